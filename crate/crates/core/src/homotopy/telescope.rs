use super::complex::{canonical_projection, canonical_truncate_ge, cone_with_maps, silly_truncate, ChainMap, Complex};
use super::hom::{homotopy_equivalence, Equivalence};
use crate::coefficients::Matrix;
use crate::discrete_mod::ModMorphism;
use crate::error::{Error, Result};

/// A finite stage `C₀ → C₁ → … → C_S` of an ω-diagram.
#[derive(Clone, Debug)]
pub struct Diagram {
    pub complexes: Vec<Complex>,
    /// `maps[k]` between `complexes[k]` and `complexes[k+1]`, pointing
    /// forward for colimits and backward for limits.
    pub maps: Vec<ChainMap>,
}

impl Diagram {
    pub fn new(complexes: Vec<Complex>, maps: Vec<ChainMap>) -> Result<Diagram> {
        if complexes.is_empty() || maps.len() + 1 != complexes.len() {
            return Err(Error::ShapeError(format!("{} maps for {} complexes", maps.len(), complexes.len())));
        }
        Ok(Diagram { complexes, maps })
    }

    /// The constant diagram with identity maps.
    pub fn constant(c: &Complex, stages: usize) -> Diagram {
        Diagram { complexes: vec![c.clone(); stages + 1], maps: vec![ChainMap::identity(c); stages] }
    }

    pub fn last(&self) -> &Complex {
        self.complexes.last().expect("nonempty")
    }

    fn stages(&self) -> usize {
        self.maps.len()
    }
}

/// The telescope triangle at a finite stage, with the comparison to the
/// last term and the degreewise splitting of the telescope sequence.
pub struct Telescope {
    pub complex: Complex,
    /// `to_last ∘ from_last = id`; the pair is a homotopy equivalence.
    pub to_last: ChainMap,
    pub from_last: ChainMap,
    split: bool,
}

impl Telescope {
    /// Whether the telescope sequence is degreewise split exact.
    pub fn is_degreewise_split(&self) -> bool {
        self.split
    }

    /// Explicit homotopies for `to_last` and `from_last`.
    pub fn equivalence(&self) -> Result<Option<Equivalence>> {
        homotopy_equivalence(&self.from_last, &self.to_last)
    }
}

/// Composites of consecutive maps: `comp[i][j]` for `i ≤ j`, along the
/// direction given by `forward`.
fn composites(d: &Diagram, forward: bool) -> Result<Vec<Vec<Option<ChainMap>>>> {
    let n = d.complexes.len();
    let mut comp: Vec<Vec<Option<ChainMap>>> = vec![vec![None; n]; n];
    for i in 0..n {
        comp[i][i] = Some(ChainMap::identity(&d.complexes[i]));
        for j in i + 1..n {
            let prev = comp[i][j - 1].clone().expect("filled");
            comp[i][j] = Some(if forward {
                d.maps[j - 1].compose(&prev)?
            } else {
                prev.compose(&d.maps[j - 1])?
            });
        }
    }
    Ok(comp)
}

fn sum_of(parts: Vec<ModMorphism>, src: &crate::discrete_mod::FPModule, tgt: &crate::discrete_mod::FPModule) -> ModMorphism {
    parts.into_iter().fold(ModMorphism::zero(src, tgt), |acc, p| acc.add(&p).expect("same ends"))
}

fn split_check(
    window: (i64, i64),
    f: &ChainMap,
    g: &ChainMap,
    r: impl Fn(i64) -> ModMorphism,
    s: impl Fn(i64) -> ModMorphism,
) -> bool {
    (window.0..=window.1).all(|i| {
        let (fi, gi, ri, si) = (f.component(i), g.component(i), r(i), s(i));
        let ok = || -> Result<bool> {
            let rf = ri.compose(&fi)?;
            let gs = gi.compose(&si)?;
            let total = fi.compose(&ri)?.add(&si.compose(&gi)?)?;
            Ok(rf.equals(&ModMorphism::identity(fi.src()))
                && gs.equals(&ModMorphism::identity(gi.tgt()))
                && gi.compose(&fi)?.is_zero()
                && total.equals(&ModMorphism::identity(fi.tgt())))
        };
        ok().unwrap_or(false)
    })
}

fn sums(d: &[Complex], backend: &crate::coefficients::Backend) -> Result<(Complex, Vec<ChainMap>, Vec<ChainMap>)> {
    if d.is_empty() {
        return Ok((Complex::zero(backend), Vec::new(), Vec::new()));
    }
    Complex::direct_sum(d)
}

/// `hocolim Cₖ` at stage `S`: the cone of `δ: ⊕_{k<S} Cₖ → ⊕_{k≤S} Cₖ`,
/// `δ(x) = x − φₖ(x)`, compared with `C_S` by summing the composites.
pub fn hocolim_telescope(d: &Diagram) -> Result<Telescope> {
    let backend = *d.last().backend();
    let s = d.stages();
    let comp = composites(d, true)?;
    let (big, inj_b, proj_b) = sums(&d.complexes, &backend)?;
    let (small, inj_s, proj_s) = sums(&d.complexes[..s], &backend)?;
    let mut delta = ChainMap::zero(&small, &big);
    for k in 0..s {
        let step = inj_b[k].sub(&inj_b[k + 1].compose(&d.maps[k])?)?;
        delta = delta.add(&step.compose(&proj_s[k])?)?;
    }
    let q = (0..=s).try_fold(ChainMap::zero(&big, d.last()), |acc, k| {
        acc.add(&comp[k][s].as_ref().expect("filled").compose(&proj_b[k])?)
    })?;
    let cone = cone_with_maps(&delta)?;
    let tel = cone.cone.clone();
    let last = d.last();
    let to_last = ChainMap::from_fn(&tel, last, |i| {
        let (src, tgt) = (tel.term(i), last.term(i));
        let ring = tgt.ring();
        let m = q.component(i).map().coerce(&ring).hstack(&Matrix::zeros(&ring, tgt.gens(), small.term(i + 1).gens())).expect("rows");
        ModMorphism::unchecked(&src, &tgt, m).expect("shapes")
    })?;
    let from_last = cone.inclusion.compose(&inj_b[s])?;
    let window = small.joint_window(&big);
    let window = (window.0.min(last.lo()), window.1.max(last.hi()));
    let r = |i: i64| {
        let parts = (0..s)
            .flat_map(|j| (0..=j).map(move |k| (j, k)))
            .map(|(j, k)| {
                inj_s[j]
                    .component(i)
                    .compose(&comp[k][j].as_ref().expect("filled").component(i).compose(&proj_b[k].component(i)).expect("composable"))
                    .expect("composable")
            })
            .collect();
        sum_of(parts, &big.term(i), &small.term(i))
    };
    let split = split_check(window, &delta, &q, r, |i| inj_b[s].component(i));
    Ok(Telescope { complex: tel, to_last, from_last, split })
}

/// `holim Cₖ` at stage `S`: `cone(ε)[−1]` for `ε: ∏_{k≤S} Cₖ → ∏_{k<S} Cₖ`,
/// `ε(x)ₖ = xₖ − ψₖ(x_{k+1})`, compared with `C_S` through the composites.
pub fn holim_telescope(d: &Diagram) -> Result<Telescope> {
    let backend = *d.last().backend();
    let s = d.stages();
    let comp = composites(d, false)?;
    let (big, inj_b, proj_b) = sums(&d.complexes, &backend)?;
    let (small, inj_s, proj_s) = sums(&d.complexes[..s], &backend)?;
    let mut eps = ChainMap::zero(&big, &small);
    for k in 0..s {
        let step = proj_b[k].sub(&d.maps[k].compose(&proj_b[k + 1])?)?;
        eps = eps.add(&inj_s[k].compose(&step)?)?;
    }
    // ι: C_S → ∏, x ↦ (ψ_{k←S} x)ₖ
    let iota = (0..=s).try_fold(ChainMap::zero(d.last(), &big), |acc, k| {
        acc.add(&inj_b[k].compose(comp[k][s].as_ref().expect("filled"))?)
    })?;
    let hol = cone_with_maps(&eps)?.cone.shift(-1);
    let last = d.last();
    let to_last = ChainMap::from_fn(&hol, last, |i| {
        let (src, tgt) = (hol.term(i), last.term(i));
        let ring = tgt.ring();
        let m = Matrix::zeros(&ring, tgt.gens(), small.term(i - 1).gens())
            .hstack(&proj_b[s].component(i).map().coerce(&ring))
            .expect("rows");
        ModMorphism::unchecked(&src, &tgt, m).expect("shapes")
    })?;
    let from_last = ChainMap::from_fn(last, &hol, |i| {
        let (src, tgt) = (last.term(i), hol.term(i));
        let ring = tgt.ring();
        let m = Matrix::zeros(&ring, small.term(i - 1).gens(), src.gens())
            .vstack(&iota.component(i).map().coerce(&ring))
            .expect("columns");
        ModMorphism::unchecked(&src, &tgt, m).expect("shapes")
    })?;
    let window = big.joint_window(last);
    // σ(y)ₖ = Σ_{k ≤ j < S} ψ_{k←j}(y_j)
    let sigma = |i: i64| {
        let parts = (0..s)
            .flat_map(|k| (k..s).map(move |j| (k, j)))
            .map(|(k, j)| {
                inj_b[k]
                    .component(i)
                    .compose(&comp[k][j].as_ref().expect("filled").component(i).compose(&proj_s[j].component(i)).expect("composable"))
                    .expect("composable")
            })
            .collect();
        sum_of(parts, &small.term(i), &big.term(i))
    };
    let split = split_check(window, &iota, &eps, |i| proj_b[s].component(i), sigma);
    Ok(Telescope { complex: hol, to_last, from_last, split })
}

/// `σ_{≥hi} C → σ_{≥hi−1} C → … → σ_{≥lo} C = C`.
pub fn silly_diagram(c: &Complex) -> Result<Diagram> {
    if c.hi() < c.lo() {
        return Ok(Diagram::constant(c, 0));
    }
    let ns: Vec<i64> = (c.lo()..=c.hi()).rev().collect();
    let complexes: Vec<Complex> = ns.iter().map(|&n| silly_truncate(c, n)).collect();
    let maps = (0..ns.len() - 1)
        .map(|k| {
            let (a, b) = (&complexes[k], &complexes[k + 1]);
            ChainMap::from_fn(a, b, |i| {
                if i >= ns[k] {
                    ModMorphism::identity(&c.term(i)).with_ends(&a.term(i), &b.term(i))
                } else {
                    ModMorphism::zero(&a.term(i), &b.term(i))
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Diagram::new(complexes, maps)
}

/// `τ_{≥hi} C ← τ_{≥hi−1} C ← … ← τ_{≥lo} C = C`.
pub fn canonical_diagram(c: &Complex) -> Result<Diagram> {
    if c.hi() < c.lo() {
        return Ok(Diagram::constant(c, 0));
    }
    let ns: Vec<i64> = (c.lo()..=c.hi()).rev().collect();
    let complexes: Vec<Complex> = ns.iter().map(|&n| canonical_truncate_ge(c, n)).collect();
    let maps = (0..ns.len() - 1)
        .map(|k| {
            let (small, big) = (&complexes[k], &complexes[k + 1]);
            let n = ns[k];
            let proj = canonical_projection(c, n).component(n);
            ChainMap::from_fn(big, small, |i| {
                if i < n {
                    ModMorphism::zero(&big.term(i), &small.term(i))
                } else if i == n {
                    proj.with_ends(&big.term(i), &small.term(i))
                } else {
                    ModMorphism::identity(&c.term(i)).with_ends(&big.term(i), &small.term(i))
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Diagram::new(complexes, maps)
}
