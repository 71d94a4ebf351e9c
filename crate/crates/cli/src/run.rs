use crate::input::{self, fmt_images, fmt_word, fmt_words};
use crate::report::Report;
use crate::{status, AutoCmd, Cli, CliError, Cmd, Constraints, CubeCmd, SpineCmd, WhCmd};
use raag::automorphism::Simplicity;
use raag::cube::{self, CubeBall, DEFAULT_BALL_CAP};
use raag::mccool::{
    build_auter_embedding, expand_fixed_subgroup, preserves_standard_family, Engine, DEFAULT_STATE_CAP,
};
use raag::partition::{based_partitions, enumerate, quadrant_partitions};
use raag::spine::{self, DEFAULT_NODE_CAP};
use raag::{Automorphism, BasedPartition, ConstraintFamily, Equivalence, Graph, RaagError, Verdict, Word};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::path::Path;

type Outcome = Result<(Report, u8), CliError>;

fn ok(r: Report) -> Outcome {
    Ok((r, 0))
}

fn load_graph(cli: &Cli) -> Result<Graph, CliError> {
    let path = cli
        .graph
        .as_ref()
        .ok_or_else(|| CliError::Usage("this command needs --graph".into()))?;
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(Graph::parse(&text)?)
}

fn cap(cli: &Cli, default: usize) -> Result<usize, CliError> {
    let cap = match cli.state_cap {
        Some(c) => c,
        None => match std::env::var("RAAG_STATE_CAP") {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("RAAG_STATE_CAP=`{v}` is not a positive integer")))?,
            Err(_) => default,
        },
    };
    if cap == 0 {
        return Err(CliError::Usage("caps must be positive".into()));
    }
    Ok(cap)
}

fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("values are serializable");
    std::fs::write(path, text + "\n").map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Yes => "yes",
        Verdict::No => "no",
        Verdict::Unknown => "unknown",
    }
}

pub fn dispatch(cli: &Cli) -> Outcome {
    if let Cmd::AuterEmbed = cli.cmd {
        let g = load_graph(cli)?;
        let (big, fam) = build_auter_embedding(&g)?;
        return ok(Report::new()
            .put("graph", big.to_text().lines().map(String::from).collect::<Vec<_>>())
            .put("stabilize", fam.stabilized.iter().map(|s| big.fmt_vertex_set(*s)).collect::<Vec<_>>())
            .put("fix", fmt_words(&big, &fam.fixed)));
    }
    let g = load_graph(cli)?;
    let g = &g;
    match &cli.cmd {
        Cmd::Reduce(w) => ok(Report::bare("word", fmt_word(g, &g.reduce(&input::word(g, &w.word)?)))),
        Cmd::Cyclic(w) => ok(Report::bare("word", fmt_word(g, &g.cyclic_reduce(&input::word(g, &w.word)?)))),
        Cmd::Length(w) => {
            let w = input::word(g, &w.word)?;
            ok(Report::new()
                .put("reduced", g.reduce(&w).len())
                .put("translation", g.translation_length(&w)))
        }
        Cmd::Conj { left, right } => {
            let (u, v) = (input::word(g, left)?, input::word(g, right)?);
            let (cu, cv) = (g.conjugacy_canonical(&u)?, g.conjugacy_canonical(&v)?);
            ok(Report::new()
                .put("conjugate", cu == cv)
                .put("left_canonical", fmt_word(g, cu.word()))
                .put("right_canonical", fmt_word(g, cv.word())))
        }
        Cmd::Auto(a) => auto(g, a),
        Cmd::Wh(w) => wh(g, w),
        Cmd::Minimize { targets, constraints } => {
            let engine = Engine::new(g, family(g, constraints)?).with_state_cap(cap(cli, DEFAULT_STATE_CAP)?);
            let m = engine.minimize(&input::words(g, targets)?);
            let end = engine.norm(&m.state);
            ok(Report::new()
                .put("start_head", json!(m.start.head))
                .put("start_tail", json!(m.start.tail))
                .put("head", json!(end.head))
                .put("tail", json!(end.tail))
                .put(
                    "trace",
                    m.trace.iter().map(|s| format!("whp {}", s.partition.to_text(g))).collect::<Vec<_>>(),
                )
                .put("pulled", fmt_words(g, &m.state.pulled))
                .put("marking", fmt_images(g, &m.state.marking)))
        }
        Cmd::Equivalent { left, right, constraints } => {
            let fam = family(g, constraints)?;
            let engine = Engine::new(g, fam.clone()).with_state_cap(cap(cli, DEFAULT_STATE_CAP)?);
            let (a, b) = (input::words(g, left)?, input::words(g, right)?);
            match engine.equivalent(&a, &b)? {
                Equivalence::Equivalent {
                    certificate,
                    level_path,
                    explored,
                } => {
                    if !engine.certifies(&certificate, &a, &b)? {
                        return Err(RaagError::Internal("certificate failed re-verification".into()).into());
                    }
                    let family_ok = preserves_standard_family(g, &certificate, &fam.stabilized);
                    if family_ok == Verdict::No {
                        return Err(RaagError::Internal("certificate moves a stabilized subgroup".into()).into());
                    }
                    Ok((
                        Report::new()
                            .put("verdict", "equivalent")
                            .put("certificate", fmt_images(g, &certificate))
                            .put("certificate_inverse", fmt_words(g, certificate.inverse_images()))
                            .put("verified", true)
                            .put("family_preserved", verdict(family_ok))
                            .put(
                                "level_path",
                                level_path.iter().map(|p| format!("whp {}", p.to_text(g))).collect::<Vec<_>>(),
                            )
                            .put("explored", explored),
                        0,
                    ))
                }
                Equivalence::Inequivalent {
                    head_a,
                    head_b,
                    tail_window,
                } => Ok((
                    Report::new()
                        .put("verdict", "inequivalent")
                        .put("head_left", json!(head_a))
                        .put("head_right", json!(head_b))
                        .put("tail_window", tail_window),
                    1,
                )),
                Equivalence::Undecided { explored, cap } => Ok((
                    Report::new()
                        .put("verdict", "undecided")
                        .put("explored", explored)
                        .put("cap", cap),
                    2,
                )),
            }
        }
        Cmd::ExpandFixed { gens } => {
            let classes = expand_fixed_subgroup(g, &input::words(g, gens)?)?;
            ok(Report::new().put(
                "classes",
                classes.iter().map(|c| fmt_word(g, c.word())).collect::<Vec<_>>(),
            ))
        }
        Cmd::AuterEmbed => unreachable!("handled above"),
        Cmd::Cube(c) => cube_cmd(cli, g, c),
        Cmd::Spine(s) => spine_cmd(cli, g, s),
    }
}

fn family(g: &Graph, c: &Constraints) -> Result<ConstraintFamily, CliError> {
    let stabilized = input::vertex_sets(g, &c.stabilize)?;
    let fixed = input::words(g, &c.fix)?;
    Ok(ConstraintFamily::new(g, stabilized, &fixed).with_tail(c.tail_len))
}

fn auto(g: &Graph, cmd: &AutoCmd) -> Outcome {
    match cmd {
        AutoCmd::Apply { gens, word } => {
            let a = input::product(g, gens)?;
            ok(Report::bare("word", fmt_word(g, &a.apply(g, &input::word(g, word)?))))
        }
        AutoCmd::Compose { left, right } => {
            let f = input::product(g, left)?.compose(g, &input::product(g, right)?)?;
            ok(Report::new().put("images", fmt_images(g, &f)))
        }
        AutoCmd::Check {
            gens,
            images,
            inverse_images,
        } => {
            let a = match (gens, images, inverse_images) {
                (Some(s), None, None) => input::product(g, s)?,
                (None, Some(i), Some(j)) => {
                    Automorphism::from_images(g, input::words(g, i)?, input::words(g, j)?)?
                }
                _ => return Err(CliError::Usage("give --gens, or --images with --inverse-images".into())),
            };
            let simple = match a.is_simple(g) {
                Simplicity::Simple => "true",
                Simplicity::NotSimple => "false",
                Simplicity::Inapplicable => "inapplicable",
            };
            let inner = a.inner_conjugator(g).map(|c| fmt_word(g, &c));
            let perm = a.as_inner_times_permutation(g).map(|(_, p)| {
                p.iter().map(|&x| g.fmt_letter(x)).collect::<Vec<_>>().join(" ")
            });
            ok(Report::new()
                .put("images", fmt_images(g, &a))
                .put("inverse_images", fmt_words(g, a.inverse_images()))
                .put("preserves_relations", a.preserves_relations(g))
                .put("uses_twist", a.uses_twist())
                .put("simple", simple)
                .put("inner_by", inner.map_or(Value::Null, Value::from))
                .put("inner_times_permutation", perm.map_or(Value::Null, Value::from)))
        }
    }
}

fn wh(g: &Graph, cmd: &WhCmd) -> Outcome {
    let based = |s: &str| BasedPartition::parse(g, s);
    match cmd {
        WhCmd::Enumerate => {
            let parts = enumerate(g);
            let lines: Vec<String> = parts
                .iter()
                .map(|(p, bases)| {
                    let b: Vec<String> = bases.iter().map(|&x| g.fmt_letter(x)).collect();
                    format!("{} bases={}", p.to_text(g), b.join(" "))
                })
                .collect();
            ok(Report::new()
                .put("count", parts.len())
                .put("based_count", based_partitions(g).len())
                .put("partition", lines))
        }
        WhCmd::Validate { partition } => match based(partition) {
            Ok(bp) => {
                let c = bp.classify();
                ok(Report::new()
                    .put("valid", true)
                    .put("link", g.fmt_letter_set(bp.link()))
                    .put("single", g.fmt_letter_set(c.single))
                    .put("double_p", g.fmt_letter_set(c.double_p))
                    .put("double_pstar", g.fmt_letter_set(c.double_q)))
            }
            Err(RaagError::InvalidPartition(why)) => {
                Ok((Report::new().put("valid", false).put("reason", why), 1))
            }
            Err(e) => Err(e.into()),
        },
        WhCmd::Apply { partition, word } => {
            let w = Automorphism::whitehead(g, &based(partition)?)?;
            ok(Report::bare("word", fmt_word(g, &w.apply(g, &input::word(g, word)?))))
        }
        WhCmd::Quadrants { first, second } => {
            let (case, outs) = quadrant_partitions(g, &based(first)?, &based(second)?)?;
            ok(Report::new()
                .put("case", format!("{case:?}"))
                .put("partition", outs.iter().map(|p| p.to_text(g)).collect::<Vec<_>>()))
        }
        WhCmd::Relcond { partition, stabilize } => {
            let bp = based(partition)?;
            ok(Report::bare(
                "holds",
                bp.relative_condition(&input::vertex_sets(g, stabilize)?),
            ))
        }
        WhCmd::Cross { partition, word } => {
            let bp = based(partition)?;
            let w = g.cyclic_reduce(&input::word(g, word)?);
            ok(Report::bare("crossings", bp.partition().crossing_count(g, &w)))
        }
    }
}

fn ball(cli: &Cli, g: &Graph, radius: usize) -> Result<CubeBall, CliError> {
    Ok(cube::build_ball_capped(g, radius, cap(cli, DEFAULT_BALL_CAP)?)?)
}

fn random_element(rng: &mut ChaCha8Rng, g: &Graph, max_len: usize) -> Word {
    let letters: Vec<_> = g.all_letters().iter().collect();
    loop {
        let len = rng.gen_range(1..=max_len);
        let w = g.reduce(&(0..len).map(|_| *letters.choose(rng).expect("nonempty graph")).collect::<Vec<_>>());
        if !w.is_empty() {
            return w;
        }
    }
}

fn cube_cmd(cli: &Cli, g: &Graph, cmd: &CubeCmd) -> Outcome {
    match cmd {
        CubeCmd::Ball { radius, export, .. } => {
            let b = ball(cli, g, radius.radius)?;
            if let Some(path) = export {
                let edges: Vec<Value> = b
                    .edges
                    .iter()
                    .zip(&b.hyperplane)
                    .map(|(e, h)| json!({"from": e.from, "to": e.to, "letter": g.fmt_letter(e.letter()), "hyperplane": h}))
                    .collect();
                write_json(
                    path,
                    &json!({
                        "stats": b.stats(),
                        "vertices": fmt_words(g, &b.vertices),
                        "edges": edges,
                        "squares": b.squares,
                    }),
                )?;
            }
            let s = b.stats();
            ok(Report::new()
                .put("radius", s.radius)
                .put("vertices", s.vertices)
                .put("edges", s.edges)
                .put("squares", s.squares)
                .put("hyperplanes", s.hyperplanes))
        }
        CubeCmd::Median { radius, x, y, z } => {
            let b = ball(cli, g, radius.radius)?;
            let w = |s: &str| input::word(g, s).map(|w| g.reduce(&w));
            let m = cube::median(&b, g, &w(x)?, &w(y)?, &w(z)?)?;
            ok(Report::bare("median", fmt_word(g, &m)))
        }
        CubeCmd::Minset { radius, g: elem } => {
            let b = ball(cli, g, radius.radius)?;
            let e = g.reduce(&input::word(g, elem)?);
            let min = cube::minset(&b, g, &e);
            let verts: Vec<Word> = min.iter().cloned().collect();
            ok(Report::new()
                .put("translation", g.translation_length(&e))
                .put("count", min.len())
                .put("invariant", cube::minset_invariance(&b, g, &e))
                .put("convex_interior", cube::minset_convexity(&b, g, &e, radius.radius / 2))
                .put("vertex", fmt_words(g, &verts)))
        }
        CubeCmd::Distcheck {
            radius,
            g: first,
            h,
            samples,
        } => {
            let b = ball(cli, g, radius.radius)?;
            if let (Some(first), Some(h)) = (first, h) {
                let (x, y) = (input::word(g, first)?, input::word(g, h)?);
                let c = cube::minset_distance_check(&b, g, &x, &y)?;
                return Ok((
                    Report::new()
                        .put("distance", c.distance)
                        .put("bound", c.bound)
                        .put("ok", c.ok),
                    u8::from(!c.ok),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let (mut checked, mut clipped, mut bad) = (0usize, 0usize, Vec::new());
            for _ in 0..*samples {
                let x = random_element(&mut rng, g, 4);
                let y = random_element(&mut rng, g, 4);
                match cube::minset_distance_check(&b, g, &x, &y) {
                    Ok(c) => {
                        checked += 1;
                        if !c.ok {
                            bad.push(format!("{} | {}", fmt_word(g, &x), fmt_word(g, &y)));
                        }
                    }
                    Err(RaagError::Clipped(_)) => clipped += 1,
                    Err(e) => return Err(e.into()),
                }
            }
            let code = u8::from(!bad.is_empty());
            Ok((
                Report::new()
                    .put("seed", cli.seed)
                    .put("checked", checked)
                    .put("clipped", clipped)
                    .put("violations", bad.len())
                    .put("violation", bad),
                code,
            ))
        }
        CubeCmd::Witness { radius, elements } => {
            let b = ball(cli, g, radius.radius)?;
            let elems: Vec<Word> = input::words(g, elements)?.iter().map(|w| g.reduce(w)).collect();
            let w = cube::bounded_displacement_witness(&b, g, &elems)?;
            ok(Report::new()
                .put("vertex", fmt_word(g, &w.vertex))
                .put("bound", w.bound)
                .put("displacements", json!(w.displacements)))
        }
    }
}

fn spine_cmd(cli: &Cli, g: &Graph, cmd: &SpineCmd) -> Outcome {
    match cmd {
        SpineCmd::Simplices { max_size, list } => {
            let simplices = spine::enumerate_simplices(g, *max_size);
            let counts: Vec<usize> = (1..=*max_size)
                .map(|k| simplices.iter().filter(|s| s.len() == k).count())
                .collect();
            let mut r = Report::new().put("total", simplices.len()).put("by_size", json!(counts));
            if *list {
                let lines: Vec<String> = simplices
                    .iter()
                    .map(|s| s.iter().map(|p| p.to_text(g)).collect::<Vec<_>>().join(" | "))
                    .collect();
                r = r.put("simplex", lines);
            }
            ok(r)
        }
        SpineCmd::Movegraph {
            targets,
            bound,
            stabilize,
            export,
        } => {
            let targets = input::words(g, targets)?;
            let bound = input::numbers(bound)?;
            if bound.len() != targets.len() {
                return Err(CliError::Usage(format!(
                    "{} bounds for {} targets",
                    bound.len(),
                    targets.len()
                )));
            }
            let family = input::vertex_sets(g, stabilize)?;
            let mg = spine::move_graph(g, &targets, &family, &bound, cap(cli, DEFAULT_NODE_CAP)?)?;
            if let Some(path) = export {
                let nodes: Vec<Value> = mg
                    .nodes
                    .iter()
                    .enumerate()
                    .map(|(i, n)| {
                        json!({
                            "id": i,
                            "head": n.head(),
                            "pulled": fmt_words(g, &n.pulled),
                            "marking": fmt_images(g, &n.marking),
                            "in_sg": n.in_sg,
                        })
                    })
                    .collect();
                let edges: Vec<Value> = mg
                    .edges
                    .iter()
                    .map(|(a, b, p)| json!({"from": a, "to": b, "partition": p.to_text(g)}))
                    .collect();
                write_json(path, &json!({"nodes": nodes, "edges": edges, "truncated": mg.truncated}))?;
            }
            let s = mg.stats();
            let code = if s.truncated { status::CAP } else { 0 };
            Ok((
                Report::new()
                    .put("nodes", s.nodes)
                    .put("edges", s.edges)
                    .put("sg_nodes", s.sg_nodes)
                    .put("unknown_nodes", s.unknown_nodes)
                    .put("components", s.components)
                    .put("sg_components", s.sg_components)
                    .put("truncated", s.truncated),
                code,
            ))
        }
        SpineCmd::Changenorm {
            targets,
            partition,
            samples,
        } => {
            if let (Some(t), Some(p)) = (targets, partition) {
                let c = spine::verify_changenorm(g, &input::words(g, t)?, &BasedPartition::parse(g, p)?)?;
                return Ok((
                    Report::new()
                        .put("before", json!(c.before))
                        .put("after", json!(c.after))
                        .put("predicted", json!(c.predicted))
                        .put("ok", c.ok),
                    u8::from(!c.ok),
                ));
            }
            let moves = based_partitions(g);
            if moves.is_empty() {
                return Err(CliError::Usage("the graph has no Whitehead partitions".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let mut bad = Vec::new();
            for _ in 0..*samples {
                let t = g.cyclic_reduce(&random_element(&mut rng, g, 6));
                let bp = moves.choose(&mut rng).expect("nonempty");
                if !spine::verify_changenorm(g, std::slice::from_ref(&t), bp)?.ok {
                    bad.push(format!("{} | {}", fmt_word(g, &t), bp.to_text(g)));
                }
            }
            let code = u8::from(!bad.is_empty());
            Ok((
                Report::new()
                    .put("seed", cli.seed)
                    .put("samples", *samples)
                    .put("violations", bad.len())
                    .put("violation", bad),
                code,
            ))
        }
    }
}
