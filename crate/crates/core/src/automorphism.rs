//! Automorphisms given by generator images, always carrying a certified
//! inverse.

use crate::error::{RaagError, Result};
use crate::graph::{Graph, Letter, Vertex, VertexSet};
use crate::partition::BasedPartition;
use crate::word::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TransvectionKind {
    Fold,
    Twist,
}

/// An elementary generator of the automorphism group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    Inversion(Vertex),
    /// Image letter of each vertex, in vertex order.
    Permutation(Vec<Letter>),
    /// `v ↦ v·by`.
    Transvection { v: Vertex, by: Letter, kind: TransvectionKind },
    /// `w ↦ by·w·by^-1` for `w` in `moved`.
    PartialConjugation { by: Letter, moved: VertexSet },
    Whitehead(BasedPartition),
}

impl Generator {
    pub fn inverse(&self) -> Generator {
        match self {
            Generator::Permutation(p) => {
                let mut inv = vec![Letter::from_code(0); p.len()];
                for (i, &x) in p.iter().enumerate() {
                    inv[x.vertex().index()] = Letter::new(Vertex(i as u8), x.is_inverse());
                }
                Generator::Permutation(inv)
            }
            Generator::Transvection { v, by, kind } => Generator::Transvection {
                v: *v,
                by: by.inverse(),
                kind: *kind,
            },
            Generator::PartialConjugation { by, moved } => Generator::PartialConjugation {
                by: by.inverse(),
                moved: *moved,
            },
            other => other.clone(),
        }
    }

    pub fn is_twist(&self) -> bool {
        matches!(
            self,
            Generator::Transvection {
                kind: TransvectionKind::Twist,
                ..
            }
        )
    }

    /// CLI syntax: `inv a`, `perm a:b b:a^-1`, `fold a b`, `twist a b^-1`,
    /// `pconj a {b,c}`, `whp P={..} Pstar={..} base=a`.
    pub fn to_text(&self, g: &Graph) -> String {
        match self {
            Generator::Inversion(v) => format!("inv {}", g.name(*v)),
            Generator::Permutation(p) => {
                let parts: Vec<String> = p
                    .iter()
                    .enumerate()
                    .map(|(i, &x)| format!("{}:{}", g.name(Vertex(i as u8)), g.fmt_letter(x)))
                    .collect();
                format!("perm {}", parts.join(" "))
            }
            Generator::Transvection { v, by, kind } => {
                let word = match kind {
                    TransvectionKind::Fold => "fold",
                    TransvectionKind::Twist => "twist",
                };
                format!("{word} {} {}", g.name(*v), g.fmt_letter(*by))
            }
            Generator::PartialConjugation { by, moved } => {
                format!("pconj {} {}", g.fmt_letter(*by), g.fmt_vertex_set(*moved))
            }
            Generator::Whitehead(bp) => format!("whp {}", bp.to_text(g)),
        }
    }

    pub fn parse(g: &Graph, text: &str) -> Result<Generator> {
        let text = text.trim();
        let (head, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
        let rest = rest.trim();
        let args: Vec<&str> = rest.split_whitespace().collect();
        let bad = || RaagError::Parse(format!("bad generator `{text}`"));
        match head {
            "inv" if args.len() == 1 => Ok(Generator::Inversion(g.vertex(args[0])?)),
            "perm" => {
                let mut images: Vec<Option<Letter>> = vec![None; g.len()];
                for a in &args {
                    let (src, dst) = a.split_once(':').ok_or_else(bad)?;
                    images[g.vertex(src)?.index()] = Some(g.parse_letter(dst)?);
                }
                let images = images
                    .into_iter()
                    .enumerate()
                    .map(|(i, x)| x.unwrap_or(Vertex(i as u8).letter()))
                    .collect();
                Ok(Generator::Permutation(images))
            }
            "fold" | "twist" if args.len() == 2 => {
                let v = g.vertex(args[0])?;
                let by = g.parse_letter(args[1])?;
                let kind = if g.adjacent(v, by.vertex()) {
                    TransvectionKind::Twist
                } else {
                    TransvectionKind::Fold
                };
                let claimed = if head == "fold" {
                    TransvectionKind::Fold
                } else {
                    TransvectionKind::Twist
                };
                if kind != claimed {
                    return Err(RaagError::InvalidAutomorphism(format!(
                        "`{text}` is a {kind:?}, not a {head}"
                    )));
                }
                Ok(Generator::Transvection { v, by, kind })
            }
            "pconj" => {
                let (by, set) = rest.split_once(char::is_whitespace).ok_or_else(bad)?;
                Ok(Generator::PartialConjugation {
                    by: g.parse_letter(by)?,
                    moved: g.parse_vertex_set(set)?,
                })
            }
            "whp" => Ok(Generator::Whitehead(BasedPartition::parse(g, rest)?)),
            _ => Err(bad()),
        }
    }
}

/// Outcome of the simplicity test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Simplicity {
    Simple,
    NotSimple,
    /// Some generator is missing from the cyclic reduction of its image.
    Inapplicable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    images: Vec<Word>,
    inverse_images: Vec<Word>,
    factorization: Option<Vec<Generator>>,
}

impl Automorphism {
    pub fn identity(g: &Graph) -> Automorphism {
        let images: Vec<Word> = g.vertices().map(|v| Word::letter(v.letter())).collect();
        Automorphism {
            inverse_images: images.clone(),
            images,
            factorization: Some(Vec::new()),
        }
    }

    /// Builds from raw images; the caller supplies inverse images, and both
    /// compositions are checked to be the identity.
    pub fn from_images(g: &Graph, images: Vec<Word>, inverse_images: Vec<Word>) -> Result<Automorphism> {
        if images.len() != g.len() || inverse_images.len() != g.len() {
            return Err(RaagError::InvalidAutomorphism(
                "one image per generator required".into(),
            ));
        }
        let a = Automorphism {
            images: images.iter().map(|w| g.reduce(w)).collect(),
            inverse_images: inverse_images.iter().map(|w| g.reduce(w)).collect(),
            factorization: None,
        };
        a.check(g)?;
        Ok(a)
    }

    fn check(&self, g: &Graph) -> Result<()> {
        for v in g.vertices() {
            let x = [v.letter()];
            if *g.reduce(&self.apply(g, &self.apply_inverse(g, &x))) != x
                || *g.reduce(&self.apply_inverse(g, &self.apply(g, &x))) != x
            {
                return Err(RaagError::InvalidAutomorphism(format!(
                    "inverse images do not invert `{}`",
                    g.name(v)
                )));
            }
        }
        if !self.preserves_relations(g) {
            return Err(RaagError::InvalidAutomorphism(
                "a commutation relation is not preserved".into(),
            ));
        }
        Ok(())
    }

    pub fn from_generator(g: &Graph, gen: &Generator) -> Result<Automorphism> {
        let images = generator_images(g, gen)?;
        let inverse_images = match gen {
            Generator::Whitehead(_) | Generator::Inversion(_) => images.clone(),
            _ => generator_images(g, &gen.inverse())?,
        };
        Ok(Automorphism {
            images,
            inverse_images,
            factorization: Some(vec![gen.clone()]),
        })
    }


    pub fn inversion(g: &Graph, v: Vertex) -> Result<Automorphism> {
        Automorphism::from_generator(g, &Generator::Inversion(v))
    }

    pub fn graph_permutation(g: &Graph, images: Vec<Letter>) -> Result<Automorphism> {
        Automorphism::from_generator(g, &Generator::Permutation(images))
    }

    /// `v ↦ v·by`, classified as a fold or a twist from the adjacency.
    pub fn transvection(g: &Graph, v: Vertex, by: Letter) -> Result<Automorphism> {
        let kind = if g.adjacent(v, by.vertex()) {
            TransvectionKind::Twist
        } else {
            TransvectionKind::Fold
        };
        Automorphism::from_generator(g, &Generator::Transvection { v, by, kind })
    }

    pub fn partial_conjugation(g: &Graph, by: Letter, moved: VertexSet) -> Result<Automorphism> {
        Automorphism::from_generator(g, &Generator::PartialConjugation { by, moved })
    }

    pub fn whitehead(g: &Graph, bp: &BasedPartition) -> Result<Automorphism> {
        Automorphism::from_generator(g, &Generator::Whitehead(*bp))
    }

    /// Product of generators in application order `gens[0] ∘ gens[1] ∘ …`.
    pub fn product(g: &Graph, gens: &[Generator]) -> Result<Automorphism> {
        let mut acc = Automorphism::identity(g);
        for gen in gens {
            acc = acc.compose(g, &Automorphism::from_generator(g, gen)?)?;
        }
        Ok(acc)
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn inverse_images(&self) -> &[Word] {
        &self.inverse_images
    }

    pub fn image(&self, v: Vertex) -> &Word {
        &self.images[v.index()]
    }

    /// Generator sequence with `self = f[0] ∘ f[1] ∘ …`, when known.
    pub fn factorization(&self) -> Option<&[Generator]> {
        self.factorization.as_deref()
    }

    pub fn uses_twist(&self) -> bool {
        self.factorization
            .as_ref()
            .is_some_and(|f| f.iter().any(Generator::is_twist))
    }

    pub fn inverse(&self) -> Automorphism {
        Automorphism {
            images: self.inverse_images.clone(),
            inverse_images: self.images.clone(),
            factorization: self
                .factorization
                .as_ref()
                .map(|f| f.iter().rev().map(Generator::inverse).collect()),
        }
    }

    fn substitute(g: &Graph, images: &[Word], w: &[Letter]) -> Word {
        let mut out = Vec::new();
        for &x in w {
            let im = &images[x.vertex().index()];
            if x.is_inverse() {
                out.extend(im.iter().rev().map(|y| y.inverse()));
            } else {
                out.extend(im.iter().copied());
            }
        }
        g.reduce(&out)
    }

    pub fn apply(&self, g: &Graph, w: &[Letter]) -> Word {
        Automorphism::substitute(g, &self.images, w)
    }

    pub fn apply_inverse(&self, g: &Graph, w: &[Letter]) -> Word {
        Automorphism::substitute(g, &self.inverse_images, w)
    }

    /// `self ∘ other`.
    pub fn compose(&self, g: &Graph, other: &Automorphism) -> Result<Automorphism> {
        if self.images.len() != other.images.len() {
            return Err(RaagError::GraphMismatch(self.images.len(), other.images.len()));
        }
        Ok(Automorphism {
            images: other.images.iter().map(|w| self.apply(g, w)).collect(),
            inverse_images: self
                .inverse_images
                .iter()
                .map(|w| other.apply_inverse(g, w))
                .collect(),
            factorization: match (&self.factorization, &other.factorization) {
                (Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
                _ => None,
            },
        })
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| **w == [Vertex(i as u8).letter()])
    }

    /// Exact equality of reduced generator images.
    pub fn same_images(&self, other: &Automorphism) -> bool {
        self.images == other.images
    }

    pub fn preserves_relations(&self, g: &Graph) -> bool {
        g.edges().into_iter().all(|(u, v)| {
            let rel = [u.letter(), v.letter(), u.inverse_letter(), v.inverse_letter()];
            self.apply(g, &rel).is_empty()
        })
    }

    pub fn is_simple(&self, g: &Graph) -> Simplicity {
        let mut simple = true;
        for v in g.vertices() {
            let support = g.support(&g.cyclic_reduce(self.image(v)));
            if !support.contains(v) {
                return Simplicity::Inapplicable;
            }
            if g.is_nontrivial_join(support) {
                simple = false;
            }
        }
        if simple {
            Simplicity::Simple
        } else {
            Simplicity::NotSimple
        }
    }

    /// True iff `self` is conjugation by some element; returns it.
    pub fn inner_conjugator(&self, g: &Graph) -> Option<Word> {
        let targets: Vec<Letter> = g.vertices().map(|v| v.letter()).collect();
        common_conjugator(g, &self.images, &targets)
    }

    pub fn outer_equal(&self, g: &Graph, other: &Automorphism) -> Result<bool> {
        Ok(self.inverse().compose(g, other)?.inner_conjugator(g).is_some())
    }

    /// The signed graph permutation `σ` with `self = ι_c ∘ σ`, if one exists.
    pub fn as_inner_times_permutation(&self, g: &Graph) -> Option<(Word, Vec<Letter>)> {
        let mut sigma = Vec::with_capacity(g.len());
        for w in &self.images {
            let (_, core) = g.peel(w);
            if core.len() != 1 {
                return None;
            }
            sigma.push(core[0]);
        }
        validate_permutation(g, &sigma).ok()?;
        let c = common_conjugator(g, &self.images, &sigma)?;
        Some((c, sigma))
    }

    /// `f^-1 ∘ g` is an inner automorphism composed with a signed graph
    /// permutation, i.e. `[S, f]` and `[S, g]` are the same marked Salvetti.
    pub fn is_graph_perm_equivalent(&self, g: &Graph, other: &Automorphism) -> Result<bool> {
        Ok(self
            .inverse()
            .compose(g, other)?
            .as_inner_times_permutation(g)
            .is_some())
    }
}

/// Validated generator images of one elementary generator.
fn generator_images(g: &Graph, gen: &Generator) -> Result<Vec<Word>> {
    let n = g.len();
    let mut images: Vec<Word> = g.vertices().map(|v| Word::letter(v.letter())).collect();
    match gen {
        Generator::Inversion(v) => {
            if v.index() >= n {
                return Err(RaagError::UnknownGenerator(format!("#{}", v.0)));
            }
            images[v.index()] = Word::letter(v.inverse_letter());
        }
        Generator::Permutation(p) => {
            validate_permutation(g, p)?;
            for (i, &x) in p.iter().enumerate() {
                images[i] = Word::letter(x);
            }
        }
        Generator::Transvection { v, by, kind } => {
            let w = by.vertex();
            if *v == w {
                return Err(RaagError::InvalidAutomorphism(
                    "a transvection needs two distinct generators".into(),
                ));
            }
            if !g.neighbours(*v).is_subset(g.star(w)) {
                return Err(RaagError::InvalidAutomorphism(format!(
                    "lk({}) is not contained in st({})",
                    g.name(*v),
                    g.name(w)
                )));
            }
            let actual = if g.adjacent(*v, w) {
                TransvectionKind::Twist
            } else {
                TransvectionKind::Fold
            };
            if actual != *kind {
                return Err(RaagError::InvalidAutomorphism(
                    "transvection kind does not match adjacency".into(),
                ));
            }
            images[v.index()] = Word::new(vec![v.letter(), *by]);
        }
        Generator::PartialConjugation { by, moved } => {
            let c = by.vertex();
            let outside = g.all_vertices().difference(g.star(c));
            for u in outside.iter() {
                for w in g.neighbours(u).intersection(outside).iter() {
                    if moved.contains(u) != moved.contains(w) {
                        return Err(RaagError::InvalidAutomorphism(format!(
                            "{} and {} commute but only one is conjugated",
                            g.name(u),
                            g.name(w)
                        )));
                    }
                }
            }
            for u in moved.difference(g.star(c)).iter() {
                images[u.index()] = Word::new(vec![*by, u.letter(), by.inverse()]);
            }
        }
        Generator::Whitehead(bp) => {
            bp.validate(g).map_err(RaagError::InvalidPartition)?;
            images = bp.images(g);
        }
    }
    Ok(images)
}

/// Checks that `p` (image letter per vertex) is a signed graph automorphism.
pub fn validate_permutation(g: &Graph, p: &[Letter]) -> Result<()> {
    if p.len() != g.len() {
        return Err(RaagError::InvalidAutomorphism(
            "a permutation needs one image per vertex".into(),
        ));
    }
    let hit: VertexSet = p.iter().map(|x| x.vertex()).collect();
    if hit != g.all_vertices() || p.iter().any(|x| x.vertex().index() >= g.len()) {
        return Err(RaagError::InvalidAutomorphism(
            "the vertex map is not a bijection".into(),
        ));
    }
    for u in g.vertices() {
        for v in g.vertices() {
            if g.adjacent(u, v) != g.adjacent(p[u.index()].vertex(), p[v.index()].vertex()) {
                return Err(RaagError::InvalidAutomorphism(format!(
                    "adjacency of {} and {} is not preserved",
                    g.name(u),
                    g.name(v)
                )));
            }
        }
    }
    Ok(())
}

/// Finds `c` with `images[i] = c · targets[i] · c^-1` for every `i`, exactly.
///
/// After the first `k` constraints the solutions form a coset `c·A_D` with
/// `D` the intersection of the stars of the targets seen so far. Each new
/// constraint has solutions `p·A_st(x)` with `p` the minimal conjugator; the
/// intersection is nonempty iff `supp(p) ⊆ D`.
pub fn common_conjugator(g: &Graph, images: &[Word], targets: &[Letter]) -> Option<Word> {
    let mut c = Word::identity();
    let mut d = g.all_vertices();
    for (im, &x) in images.iter().zip(targets) {
        let y = g.multiply(&[&c.inverse(), im, &c]);
        let (p, core) = g.peel(&y);
        if *core != [x] || !g.support(&p).is_subset(d) {
            return None;
        }
        c = g.multiply(&[&c, &p]);
        d = d.intersection(g.star(x.vertex()));
    }
    Some(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Graph {
        Graph::edgeless(&["a", "b"]).unwrap()
    }

    fn show(g: &Graph, a: &Automorphism) -> Vec<String> {
        a.images().iter().map(|w| g.fmt_word(w)).collect()
    }

    #[test]
    fn inversion_is_an_involution() {
        let g = f2();
        let i = Automorphism::inversion(&g, Vertex(0)).unwrap();
        assert_eq!(show(&g, &i), ["a^-1", "b"]);
        assert!(i.compose(&g, &i).unwrap().is_identity());
        let w = g.parse_word("a b").unwrap();
        assert_eq!(g.fmt_word(&i.apply(&g, &w)), "a^-1 b");
    }

    #[test]
    fn permutations() {
        let g = f2();
        assert!(Automorphism::graph_permutation(&g, vec![Vertex(1).letter(), Vertex(0).letter()]).is_ok());
        let p = Graph::new(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        let swap = vec![Vertex(1).letter(), Vertex(0).letter(), Vertex(2).letter()];
        assert!(Automorphism::graph_permutation(&p, swap).is_err());
        let f3 = Graph::edgeless(&["a", "b", "c"]).unwrap();
        let signed = vec![Vertex(1).inverse_letter(), Vertex(0).letter(), Vertex(2).letter()];
        let s = Automorphism::graph_permutation(&f3, signed).unwrap();
        assert!(s.inverse().compose(&f3, &s).unwrap().is_identity());
    }

    #[test]
    fn transvections() {
        let g = f2();
        let f = Automorphism::transvection(&g, Vertex(0), Vertex(1).letter()).unwrap();
        assert_eq!(f.factorization().unwrap()[0].to_text(&g), "fold a b");
        let z2 = Graph::new(&["a", "b"], &[("a", "b")]).unwrap();
        let t = Automorphism::transvection(&z2, Vertex(0), Vertex(1).letter()).unwrap();
        assert!(t.uses_twist());
        let p = Graph::new(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        assert!(Automorphism::transvection(&p, Vertex(0), Vertex(2).letter()).is_ok());
        // lk(b) = {a, c} is not inside st(a)
        assert!(Automorphism::transvection(&p, Vertex(1), Vertex(0).letter()).is_err());
    }

    #[test]
    fn partial_conjugations() {
        let f3 = Graph::edgeless(&["a", "b", "c"]).unwrap();
        let moved = VertexSet::singleton(Vertex(1));
        assert!(Automorphism::partial_conjugation(&f3, Vertex(0).letter(), moved).is_ok());
        let p = Graph::new(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        assert!(Automorphism::partial_conjugation(&p, Vertex(1).letter(), VertexSet::singleton(Vertex(0))).is_ok());
        // a isolated, b–d an edge: conjugating b but not d breaks [b, d] = 1
        let g = Graph::new(&["a", "b", "c", "d"], &[("b", "d")]).unwrap();
        assert!(Automorphism::partial_conjugation(&g, Vertex(0).letter(), moved).is_err());
    }

    #[test]
    fn apply_and_compose() {
        let g = f2();
        let fold = Automorphism::transvection(&g, Vertex(0), Vertex(1).letter()).unwrap();
        assert_eq!(g.fmt_word(&fold.apply(&g, &g.parse_word("a").unwrap())), "a b");
        assert_eq!(g.fmt_word(&fold.apply(&g, &g.parse_word("a b^-1").unwrap())), "a");
        let inv_b = Automorphism::inversion(&g, Vertex(1)).unwrap();
        // substituting the fold's images into the inversion
        let c = inv_b.compose(&g, &fold).unwrap();
        assert_eq!(show(&g, &c), ["a b^-1", "b^-1"]);
        let d = fold.compose(&g, &inv_b).unwrap();
        assert_eq!(show(&g, &d), ["a b", "b^-1"]);
        let id = Automorphism::identity(&g);
        assert!(c.compose(&g, &id).unwrap().same_images(&c));
        let f3 = Graph::edgeless(&["a", "b", "c"]).unwrap();
        assert!(matches!(c.compose(&g, &Automorphism::identity(&f3)), Err(RaagError::GraphMismatch(2, 3))));
    }

    #[test]
    fn simplicity() {
        let g = f2();
        assert_eq!(Automorphism::identity(&g).is_simple(&g), Simplicity::Simple);
        let fold = Automorphism::transvection(&g, Vertex(0), Vertex(1).letter()).unwrap();
        assert_eq!(fold.is_simple(&g), Simplicity::Simple);
        let z2 = Graph::new(&["a", "b"], &[("a", "b")]).unwrap();
        let t = Automorphism::transvection(&z2, Vertex(0), Vertex(1).letter()).unwrap();
        assert_eq!(t.is_simple(&z2), Simplicity::NotSimple);
    }

    #[test]
    fn graph_perm_equivalence() {
        let g = f2();
        let id = Automorphism::identity(&g);
        let inv = Automorphism::inversion(&g, Vertex(0)).unwrap();
        let fold = Automorphism::transvection(&g, Vertex(0), Vertex(1).letter()).unwrap();
        assert!(id.is_graph_perm_equivalent(&g, &id).unwrap());
        assert!(id.is_graph_perm_equivalent(&g, &inv).unwrap());
        assert!(!id.is_graph_perm_equivalent(&g, &fold).unwrap());
        // an inner automorphism is equivalent to the identity
        let inner = Automorphism::partial_conjugation(&g, Vertex(0).letter(), g.all_vertices()).unwrap();
        assert!(id.is_graph_perm_equivalent(&g, &inner).unwrap());
        // a proper partial conjugation is not
        let f3 = Graph::edgeless(&["a", "b", "c"]).unwrap();
        let pc = Automorphism::partial_conjugation(&f3, Vertex(0).letter(), VertexSet::singleton(Vertex(1))).unwrap();
        assert!(!Automorphism::identity(&f3).is_graph_perm_equivalent(&f3, &pc).unwrap());
    }

    #[test]
    fn descriptor_text_roundtrip() {
        let f3 = Graph::edgeless(&["a", "b", "c"]).unwrap();
        for text in ["inv b", "perm a:b b:a^-1 c:c", "fold a c^-1", "pconj a^-1 {b,c}"] {
            let gen = Generator::parse(&f3, text).unwrap();
            assert_eq!(gen.to_text(&f3), text);
        }
        assert!(Generator::parse(&f3, "twist a b").is_err());
    }
}
