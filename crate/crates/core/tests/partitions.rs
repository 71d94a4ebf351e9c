mod common;

use common::*;
use proptest::prelude::*;
use raag::partition::{based_partitions, enumerate, quadrant_partitions, QuadrantCase};
use raag::{Automorphism, BasedPartition, Graph, LetterSet};
use raag_oracles as oracle;

fn with_partitions() -> Vec<Graph> {
    vec![free(2), free(3), path(3), graph(3, &[(0, 1)]), path(4)]
}

fn sorted(s: LetterSet) -> Vec<i32> {
    let mut v = to_oracle(&s.iter().collect::<Vec<_>>());
    v.sort();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn crossing_count_matches_blowup(gi in 0usize..5, seed in any::<u64>()) {
        let g = &with_partitions()[gi];
        let adj = adj_of(g);
        let mut r = rng(seed);
        let w = g.cyclic_reduce(&random_word_in(&mut r, g, 0..=6));
        for (p, _) in enumerate(g) {
            let (a, _) = p.sides();
            let theirs = oracle::blowup_crossings(&adj, &sorted(a), &sorted(p.link()), &to_oracle(&w));
            prop_assert_eq!(p.crossing_count(g, &w), theirs, "{} on {}", p.to_text(g), g.fmt_word(&w));
        }
    }
}

#[test]
fn based_partitions_validate_and_round_trip() {
    for g in with_partitions() {
        for bp in based_partitions(&g) {
            assert!(bp.validate(&g).is_ok());
            assert_eq!(BasedPartition::parse(&g, &bp.to_text(&g)).unwrap(), bp);
            assert_eq!(bp.flipped().flipped(), bp);
            assert!(bp.flipped().validate(&g).is_err() || bp.flipped().base() == bp.base().inverse());
        }
    }
}

#[test]
fn compatibility_is_symmetric() {
    for g in with_partitions() {
        let parts: Vec<_> = enumerate(&g).into_iter().map(|(p, _)| p).collect();
        for a in &parts {
            assert!(a.compatible(&g, a).is_err());
            for b in parts.iter().filter(|b| *b != a) {
                assert_eq!(a.compatible(&g, b).unwrap(), b.compatible(&g, a).unwrap());
            }
        }
    }
}

#[test]
fn whitehead_images_match_the_letter_rule() {
    // W(x) is read off from where x and x^-1 sit relative to the basepoint
    for g in with_partitions() {
        for bp in based_partitions(&g) {
            let w = Automorphism::whitehead(&g, &bp).unwrap();
            let b = bp.base();
            for v in g.vertices() {
                let x = v.letter();
                let mut expect = Vec::new();
                if v == b.vertex() {
                    expect.push(x.inverse());
                } else {
                    if bp.p().contains(x.inverse()) {
                        expect.push(b);
                    }
                    expect.push(x);
                    if bp.p().contains(x) {
                        expect.push(b.inverse());
                    }
                }
                assert_eq!(w.image(v), &g.reduce(&expect));
            }
        }
    }
}

#[test]
fn quadrant_examples_in_f3() {
    let g = free(3);
    let parse = |s: &str| BasedPartition::parse(&g, s).unwrap();
    let p = parse("P={a,b,c} Pstar={a^-1,b^-1,c^-1} base=a");
    let q = parse("P={a,b,c^-1} Pstar={a^-1,b^-1,c} base=a");
    assert!(!p.partition().compatible(&g, &q.partition()).unwrap());
    let (case, outs) = quadrant_partitions(&g, &p, &q).unwrap();
    assert_eq!(case, QuadrantCase::SingleBase);
    for o in outs {
        assert!(o.partition().compatible(&g, &p.partition()).unwrap());
        assert!(o.partition().compatible(&g, &q.partition()).unwrap());
    }
    assert!(quadrant_partitions(&g, &p, &p).is_err());
}

#[test]
fn relative_condition_examples() {
    let g = free(3);
    let bp = BasedPartition::parse(&g, "P={a,b} Pstar={a^-1,b^-1,c,c^-1} base=a").unwrap();
    let v = |s: &str| g.parse_vertex_set(s).unwrap();
    assert!(bp.relative_condition(&[]));
    assert!(bp.relative_condition(&[v("{a,b}")]));
    assert!(!bp.relative_condition(&[v("{b}")]));
    assert!(bp.relative_condition(&[v("{c}")]));
    assert!(!bp.relative_condition(&[v("{c}"), v("{b,c}")]));
}
