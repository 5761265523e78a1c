use super::complex::{cone, induced_map, ChainMap, Complex};
use super::free::{ContraComplex, FreeChainMap, FreeComplex, TowerComplex};
use crate::coefficients::{Level, Matrix, Ring, Scalar, Solver};
use crate::discrete_mod::{direct_sum, minimize, FPModule, ModMorphism};
use crate::error::{Error, Result};

/// A bounded complex of free `Λ`-modules with a chain map `ε: P• → N•`.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub complex: FreeComplex,
    pub target: Complex,
    lo: i64,
    aug: Vec<Matrix>,
}

impl Resolution {
    /// Matrix of `εⁱ` over `Λ` (`gens(Nⁱ) × rank(Pⁱ)`).
    pub fn augmentation(&self, i: i64) -> Matrix {
        let j = i - self.lo;
        if j >= 0 && (j as usize) < self.aug.len() {
            self.aug[j as usize].clone()
        } else {
            Matrix::zeros(&self.complex.base_ring(), self.target.term(i).gens(), self.complex.rank(i))
        }
    }

    /// `ε` from the reduction of `P•` at `level`, which must kill the target.
    pub fn augmentation_at(&self, level: Level) -> Result<ChainMap> {
        if level < self.target.level() {
            return Err(Error::LevelError(format!("level {level} does not kill the resolved complex")));
        }
        let src = self.complex.at_level(level);
        Ok(ChainMap::unchecked(&src, &self.target, |i| {
            let (s, t) = (src.term(i), self.target.term(i));
            if s.gens() == 0 || t.gens() == 0 {
                ModMorphism::zero(&s, &t)
            } else {
                ModMorphism::unchecked(&s, &t, self.augmentation(i).coerce(&t.ring())).expect("shapes")
            }
        }))
    }

    /// `ε` over `Λ` into the target read over `Λ`.
    pub fn augmentation_over_base(&self) -> ChainMap {
        let src = self.complex.at_level(Level::Infinite);
        let tgt = self.target.over_base();
        ChainMap::unchecked(&src, &tgt, |i| {
            let (s, t) = (src.term(i), tgt.term(i));
            if s.gens() == 0 || t.gens() == 0 {
                ModMorphism::zero(&s, &t)
            } else {
                ModMorphism::unchecked(&s, &t, self.augmentation(i)).expect("shapes")
            }
        })
    }

    /// Whether `ε` is a quasi-isomorphism of complexes of `Λ`-modules.
    pub fn is_quasi_isomorphism(&self) -> bool {
        self.augmentation_over_base().is_quasi_isomorphism()
    }

    /// Levelwise shadow in `Cohpro`: the cohomology of `cone(ε_k)` is
    /// pro-zero, i.e. `Hⁱ(cone(ε_{k+lag})) → Hⁱ(cone(ε_k))` vanishes for
    /// every `k ≤ depth`, with `lag` the annihilation level of the target.
    pub fn levelwise_certificate(&self, depth: usize) -> Result<bool> {
        let lag = match self.target.level() {
            Level::Finite(n) => n as usize,
            Level::Infinite => return Ok(self.is_quasi_isomorphism()),
        };
        let start = lag;
        let cones = (start..=depth + 2 * lag)
            .map(|k| cone(&self.augmentation_at(Level::Finite(k as u32))?))
            .collect::<Result<Vec<_>>>()?;
        for k in start..=depth + lag {
            let (big, small) = (&cones[k + lag - start], &cones[k - start]);
            let red = ChainMap::unchecked(big, small, |i| {
                let (s, t) = (big.term(i), small.term(i));
                let ring = t.ring();
                let id = Matrix::from_fn(&ring, t.gens(), s.gens(), |a, b| if a == b { ring.one() } else { ring.zero() });
                ModMorphism::unchecked(&s, &t, id).expect("shapes")
            });
            for i in big.lo().min(small.lo())..=big.hi().max(small.hi()) {
                let (hb, hs) = (big.cohomology_data(i), small.cohomology_data(i));
                if !induced_map(&red, i, &hb, &hs)?.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn tower_complex(&self) -> TowerComplex {
        TowerComplex(self.complex.clone())
    }
}

/// A finite module in diagonal form `⊕ Λ/δⱼ` with the comparison maps.
struct Diagonal {
    gens: usize,
    to: ModMorphism,
    from: ModMorphism,
    divisors: Vec<Option<Scalar>>,
    columns: Vec<Option<usize>>,
    torsion: usize,
}

fn diagonal(n: &FPModule) -> Diagonal {
    let (s, to, from) = minimize(n);
    let backend = *n.backend();
    let base = backend.base_ring();
    let ring = s.ring();
    let rels = s.rels();
    let mut divisors = Vec::new();
    for j in 0..s.gens() {
        let entry = (0..rels.cols()).map(|c| rels.get(j, c)).find(|x| !ring.is_zero(x));
        let d = match (s.level(), entry) {
            (Level::Finite(_), Some(x)) => Some(backend.base_pi_pow(ring.valuation(x).expect("nonzero"))),
            (Level::Finite(l), None) => Some(backend.base_pi_pow(l)),
            (Level::Infinite, Some(x)) => Some(base.canonical(x)),
            (Level::Infinite, None) => None,
        };
        divisors.push(d);
    }
    let mut torsion = 0;
    let columns = divisors
        .iter()
        .map(|d| {
            d.as_ref().map(|_| {
                torsion += 1;
                torsion - 1
            })
        })
        .collect();
    Diagonal { gens: s.gens(), to, from, divisors, columns, torsion }
}

impl Diagonal {
    /// `ρ: Λ^{torsion} → Λ^{gens}`.
    fn rho(&self, base: &Ring) -> Matrix {
        let mut m = Matrix::zeros(base, self.gens, self.torsion);
        for (j, d) in self.divisors.iter().enumerate() {
            if let (Some(d), Some(c)) = (d, self.columns[j]) {
                m.set(j, c, d.clone());
            }
        }
        m
    }

    /// `X` with `ρ·X = a`, dividing row `j` by `δⱼ`.
    fn divide(&self, a: &Matrix, base: &Ring) -> Result<Matrix> {
        let mut x = Matrix::zeros(base, self.torsion, a.cols());
        for j in 0..self.gens {
            for k in 0..a.cols() {
                let v = a.get(j, k);
                match (&self.divisors[j], self.columns[j]) {
                    (Some(d), Some(c)) => {
                        let q = base
                            .exact_div(v, d)
                            .ok_or_else(|| Error::InvalidInput("lifted differential leaves the relations".into()))?;
                        x.set(c, k, q);
                    }
                    _ if base.is_zero(v) => {}
                    _ => return Err(Error::InvalidInput("lifted differential hits a free summand".into())),
                }
            }
        }
        Ok(x)
    }
}

/// Resolution of a bounded complex of finite modules by the twisted
/// assembly of the termwise two-step covers `0 → F₁ →ρ F₀ → Nᵐ → 0`:
/// `Qᵐ = F₀ᵐ ⊕ F₁^{m+1}` with `D = [[d₀, ρ], [−h, −d₁]]`, where `d₀` lifts
/// `d_N`, `d₀ρ = ρd₁` and `d₀d₀ = ρh`. The augmentation is `(x, y) ↦ x`.
pub fn resolve_cohpro(n: &Complex) -> Result<Resolution> {
    let backend = *n.backend();
    let base = backend.base_ring();
    if n.hi() < n.lo() {
        return Ok(Resolution { complex: FreeComplex::zero(&backend), target: n.clone(), lo: 0, aug: Vec::new() });
    }
    let (lo, hi) = (n.lo(), n.hi());
    let diag: Vec<Diagonal> = (lo..=hi).map(|m| diagonal(&n.term(m))).collect();
    let g = |m: i64| if (lo..=hi).contains(&m) { diag[(m - lo) as usize].gens } else { 0 };
    let t = |m: i64| if (lo..=hi).contains(&m) { diag[(m - lo) as usize].torsion } else { 0 };
    let d0 = |m: i64| -> Result<Matrix> {
        if g(m) == 0 || g(m + 1) == 0 {
            return Ok(Matrix::zeros(&base, g(m + 1), g(m)));
        }
        let (a, b) = (&diag[(m - lo) as usize], &diag[(m + 1 - lo) as usize]);
        Ok(b.to.compose(&n.diff(m).compose(&a.from)?)?.map().coerce(&base))
    };
    let rho = |m: i64| -> Matrix {
        if (lo..=hi).contains(&m) {
            diag[(m - lo) as usize].rho(&base)
        } else {
            Matrix::zeros(&base, 0, 0)
        }
    };
    let divide = |m: i64, a: &Matrix| -> Result<Matrix> {
        if (lo..=hi).contains(&m) {
            diag[(m - lo) as usize].divide(a, &base)
        } else {
            Ok(Matrix::zeros(&base, 0, a.cols()))
        }
    };
    let d1 = |m: i64| -> Result<Matrix> { divide(m + 1, &d0(m)?.mul(&rho(m))?) };
    let h = |m: i64| -> Result<Matrix> { divide(m + 2, &d0(m + 1)?.mul(&d0(m)?)?) };
    let (qlo, qhi) = (lo - 1, hi);
    let ranks: Vec<usize> = (qlo..=qhi).map(|m| g(m) + t(m + 1)).collect();
    let diffs = (qlo..qhi)
        .map(|m| {
            let top = d0(m)?.hstack(&rho(m + 1))?;
            let bottom = h(m)?.neg().hstack(&d1(m + 1)?.neg())?;
            top.vstack(&bottom)
        })
        .collect::<Result<Vec<_>>>()?;
    let complex = FreeComplex::new(&backend, qlo, ranks, diffs)?;
    let aug = (qlo..=qhi)
        .map(|m| {
            let rows = n.term(m).gens();
            let x = if (lo..=hi).contains(&m) {
                diag[(m - lo) as usize].from.map().coerce(&base)
            } else {
                Matrix::zeros(&base, rows, 0)
            };
            x.hstack(&Matrix::zeros(&base, rows, t(m + 1)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Resolution { complex, target: n.clone(), lo: qlo, aug })
}

/// `Ξ(N•)`: the dual of the resolution, `Ξ(N)ⁱ = (P^{−i})^*`.
pub fn xi(n: &Complex) -> Result<ContraComplex> {
    Ok(ContraComplex(resolve_cohpro(n)?.complex.dual()))
}

/// Lifts `g = f ∘ ε_src` along `ε_tgt`, from the top degree down: the
/// component in degree `n` solves `ε y ≡ g x` (modulo the relations of
/// the target) together with `d y = Φ^{n+1}(d x)`.
pub fn lift_along(src: &FreeComplex, g: impl Fn(i64) -> Matrix, tgt: &Resolution) -> Result<FreeChainMap> {
    let base = src.base_ring();
    let q = &tgt.complex;
    let (lo, hi) = src.joint_window(q);
    let mut comps: Vec<Matrix> = Vec::new();
    let mut above = Matrix::zeros(&base, q.rank(hi + 1), src.rank(hi + 1));
    for n in (lo..=hi).rev() {
        let (rs, rq) = (src.rank(n), q.rank(n));
        let target = tgt.target.term(n).over_base();
        let rel = target.rels().coerce(&base);
        let ng = target.gens();
        let eps = tgt.augmentation(n);
        let dq = q.diff(n);
        let top = eps.hstack(&rel.neg())?;
        let bottom = dq.hstack(&Matrix::zeros(&base, q.rank(n + 1), rel.cols()))?;
        let a = top.vstack(&bottom)?;
        let rhs = g(n).coerce(&base).vstack(&above.mul(&src.diff(n))?)?;
        let phi = if rs == 0 {
            Matrix::zeros(&base, rq, 0)
        } else if a.cols() == 0 {
            if !rhs.is_zero() {
                return Err(Error::InvalidInput(format!("nothing to lift to in degree {n}")));
            }
            Matrix::zeros(&base, rq, rs)
        } else {
            let sol = Solver::new(&a)
                .solve_matrix(&rhs)?
                .ok_or_else(|| Error::InvalidInput(format!("no lift in degree {n}")))?;
            sol.block(0, rq, 0, rs)
        };
        debug_assert_eq!(ng, eps.rows());
        comps.push(phi.clone());
        above = phi;
    }
    comps.reverse();
    FreeChainMap::new(src, q, |i| comps[(i - lo) as usize].clone())
}

/// The lift of a chain map `f: N• → M•` between resolutions.
pub fn lift_chain_map(f: &ChainMap, src: &Resolution, tgt: &Resolution) -> Result<FreeChainMap> {
    let base = src.complex.base_ring();
    lift_along(
        &src.complex,
        |i| f.component(i).map().coerce(&base).mul(&src.augmentation(i)).expect("shapes"),
        tgt,
    )
}

/// `Ξ(f): Ξ(M•) → Ξ(N•)` for `f: N• → M•`, through the given resolutions.
pub fn xi_map(f: &ChainMap, src: &Resolution, tgt: &Resolution) -> Result<FreeChainMap> {
    Ok(lift_chain_map(f, src, tgt)?.dual())
}

/// The cone of a lift `Φ` over `f`, resolving `cone(f)` through `cone(ε)`.
pub fn cone_resolution(f: &ChainMap, phi: &FreeChainMap, src: &Resolution, tgt: &Resolution) -> Result<Resolution> {
    let complex = super::free::free_cone(phi)?;
    let target = cone(f)?;
    let base = complex.base_ring();
    let (lo, hi) = (complex.lo(), complex.hi());
    let aug = (lo..=hi)
        .map(|i| Matrix::block_diag_all(&base, &[tgt.augmentation(i), src.augmentation(i + 1)]))
        .collect::<Result<Vec<_>>>()?;
    for (i, a) in (lo..=hi).zip(&aug) {
        if a.rows() != target.term(i).gens() {
            return Err(Error::ShapeError("cone terms do not match".into()));
        }
    }
    Ok(Resolution { complex, target, lo, aug })
}

/// Resolution by downward induction with kernels over `Λ`: `Qⁿ` is free on
/// generators of `{(q, m) ∈ Q^{n+1} ⊕ Mⁿ : dq = 0, φq = dm}`.
pub fn kernel_resolution(m: &Complex) -> Result<Resolution> {
    let backend = *m.backend();
    let base = backend.base_ring();
    if m.hi() < m.lo() {
        return Ok(Resolution { complex: FreeComplex::zero(&backend), target: m.clone(), lo: 0, aug: Vec::new() });
    }
    let mb = m.over_base();
    let free = |k: usize| super::free::free_at(&backend, Level::Infinite, k);
    // per degree, from the top: (rank, d out of it, φ)
    let mut ranks: Vec<usize> = Vec::new();
    let mut diffs: Vec<Matrix> = Vec::new();
    let mut phis: Vec<Matrix> = Vec::new();
    let (mut up_rank, mut up_d, mut up_phi) = (0usize, Matrix::zeros(&base, 0, 0), Matrix::zeros(&base, mb.term(m.hi() + 1).gens(), 0));
    let mut n = m.hi();
    let floor = m.lo() - m.span() as i64 - 4;
    loop {
        let (mn, mn1) = (mb.term(n), mb.term(n + 1));
        let (src, _, _) = direct_sum(&[free(up_rank), mn.clone()])?;
        let (tgt, _, _) = direct_sum(&[free(up_d.rows()), mn1.clone()])?;
        let blocks = vec![
            vec![up_d.clone(), Matrix::zeros(&base, up_d.rows(), mn.gens())],
            vec![up_phi.clone(), mb.diff(n).map().coerce(&base).neg()],
        ];
        let map = if src.gens() == 0 || tgt.gens() == 0 {
            ModMorphism::zero(&src, &tgt)
        } else {
            crate::discrete_mod::block_morphism(&src, &tgt, &blocks)?
        };
        let (k, incl) = map.kernel();
        let r = k.gens();
        if r == 0 && n < m.lo() {
            break;
        }
        if n < floor {
            return Err(Error::InvalidInput("kernel resolution does not terminate".into()));
        }
        let x = incl.map().coerce(&base);
        let d = x.block(0, up_rank, 0, r);
        let phi = x.block(up_rank, up_rank + mn.gens(), 0, r);
        ranks.push(r);
        diffs.push(d.clone());
        phis.push(phi.clone());
        up_rank = r;
        up_d = d;
        up_phi = phi;
        n -= 1;
    }
    let lo = n + 1;
    ranks.reverse();
    phis.reverse();
    diffs.reverse();
    // diffs[j] is the differential out of degree lo + j into lo + j + 1; the last one maps to zero
    let inner: Vec<Matrix> = diffs.into_iter().take(ranks.len().saturating_sub(1)).collect();
    let complex = FreeComplex::new(&backend, lo, ranks, inner)?;
    Ok(Resolution { complex, target: m.clone(), lo, aug: phis })
}

/// `ψ(a, b) = (b, −a)`: the isomorphism `(cone Φ)^* ≅ cone(Φ^*)[−1]`.
pub fn dual_cone_iso(phi: &FreeChainMap) -> Result<FreeChainMap> {
    let src = super::free::free_cone(phi)?.dual();
    let tgt = super::free::free_cone(&phi.dual())?.shift(-1);
    let base = src.base_ring();
    let (qn, qm) = (&phi.src, &phi.tgt);
    FreeChainMap::new(&src, &tgt, |i| {
        let (a, b) = (qm.rank(-i), qn.rank(1 - i));
        let top = Matrix::zeros(&base, b, a).hstack(&Matrix::identity(&base, b)).expect("rows");
        let bottom = Matrix::identity(&base, a).neg().hstack(&Matrix::zeros(&base, a, b)).expect("rows");
        top.vstack(&bottom).expect("columns")
    })
}

/// Triangulated shadow of `Ξ` on `f: N• → M•`: the cone of the lift of `f`
/// resolves `cone(f)`, it is homotopy equivalent over `Λ` to the direct
/// resolution of `cone(f)`, and its dual is `cone(Ξ(f))[−1]` through `ψ`.
pub fn xi_cone_shadow(f: &ChainMap) -> Result<bool> {
    use super::free::free_null_homotopy;
    let (rn, rm) = (resolve_cohpro(f.src())?, resolve_cohpro(f.tgt())?);
    let phi = lift_chain_map(f, &rn, &rm)?;
    let rc = cone_resolution(f, &phi, &rn, &rm)?;
    if !rc.is_quasi_isomorphism() {
        return Ok(false);
    }
    let direct = resolve_cohpro(&rc.target)?;
    let a = lift_along(&rc.complex, |i| rc.augmentation(i), &direct)?;
    let b = lift_along(&direct.complex, |i| direct.augmentation(i), &rc)?;
    let ba = b.compose(&a)?.sub(&FreeChainMap::identity(&rc.complex))?;
    let ab = a.compose(&b)?.sub(&FreeChainMap::identity(&direct.complex))?;
    if free_null_homotopy(&ba, Level::Infinite)?.is_none() || free_null_homotopy(&ab, Level::Infinite)?.is_none() {
        return Ok(false);
    }
    let psi = dual_cone_iso(&phi)?;
    let to_shifted = psi.compose(&a.dual())?;
    Ok(to_shifted.src == direct.complex.dual())
}
