//! Eigenbasis of the Stokes operator with Navier slip on the unit disk.
//!
//! Mode `(n, parity, s)` has stream function
//! `ψ = (normC / s²) [J_n(s r) − J_n(s) r^n] trig(nθ)`, velocity
//! `v = −∇⊥ψ = (∂_θψ / r) e_r − ∂_rψ e_θ` and vorticity
//! `ξ = −Δψ = normC J_n(s r) trig(nθ)`, with eigenvalue `λ = s²`.
//! Boundary orientation: `n = e_r`, `t = e_θ`, so `u·t = −∂_rψ` on the circle.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;
#[allow(unused_imports)]
use num_traits::Float;
use sha2::{Digest, Sha256};

use crate::bessel::{self, MAX_ARG, MAX_ORDER};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureGrid;
use crate::secular::{self, TangencyFlag};

/// Gram deviation above which a build is rejected as under-resolved.
pub const GRAM_LIMIT: f64 = 1e-6;

/// Unit disk with constant friction coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec {
    alpha: f64,
}

impl DomainSpec {
    pub const RADIUS: f64 = 1.0;
    pub const CURVATURE: f64 = 1.0;

    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Domain(format!(
                "friction coefficient must be positive, got {alpha}"
            )));
        }
        Ok(Self { alpha })
    }

    /// `α = 2κ`: vorticity vanishes on the boundary.
    pub fn lions() -> Self {
        Self {
            alpha: 2.0 * Self::CURVATURE,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `2κ − α`, the factor in `ξ = (2κ − α) u·t`.
    pub fn vorticity_coupling(&self) -> f64 {
        2.0 * Self::CURVATURE - self.alpha
    }

    /// `κ − α`, the boundary weight in the operator's bilinear form.
    pub fn boundary_weight(&self) -> f64 {
        Self::CURVATURE - self.alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Cos,
    Sin,
}

impl Parity {
    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Cos => "cos",
            Parity::Sin => "sin",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "cos" => Some(Parity::Cos),
            "sin" => Some(Parity::Sin),
            _ => None,
        }
    }

    /// `(trig(nθ), d/dθ trig(nθ))`.
    #[inline]
    pub fn eval(self, n: u32, theta: f64) -> (f64, f64) {
        let nf = n as f64;
        let (s, c) = (nf * theta).sin_cos();
        match self {
            Parity::Cos => (c, -nf * s),
            Parity::Sin => (s, nf * c),
        }
    }
}

/// One normalized eigenmode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub n: u32,
    pub parity: Parity,
    pub s: f64,
    pub lambda: f64,
    /// Scale making the velocity field unit L².
    pub norm_c: f64,
    /// `‖curl v‖_{L²}` after normalization.
    pub mu: f64,
}

/// Pointwise values of a mode (or a superposition).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldSample {
    pub psi: f64,
    pub u_r: f64,
    pub u_theta: f64,
    pub xi: f64,
}

/// Radial factors of one mode: `u_r = P Θ'`, `u_θ = Q Θ`, `ξ = X Θ`.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct RadialValues {
    pub psi: f64,
    pub p: f64,
    pub dp: f64,
    pub q: f64,
    pub dq: f64,
    pub x: f64,
    pub dx: f64,
}

impl RadialValues {
    fn at(n: u32, s: f64, norm_c: f64, r: f64) -> Self {
        let r = r.max(1e-12);
        let nf = n as f64;
        let c = norm_c / (s * s);
        let sr = s * r;
        let (j, dj) = bessel::jn_with_derivative(n, sr);
        let ddj = -dj / sr - (1.0 - nf * nf / (sr * sr)) * j;
        let jb = bessel::jn(n, s);
        let rn = r.powi(n as i32);
        let big_r = j - jb * rn;
        let dr = s * dj - if n == 0 { 0.0 } else { nf * jb * rn / r };
        let ddr = s * s * ddj
            - if n < 2 {
                0.0
            } else {
                nf * (nf - 1.0) * jb * rn / (r * r)
            };
        Self {
            psi: c * big_r,
            p: c * big_r / r,
            dp: c * (dr / r - big_r / (r * r)),
            q: -c * dr,
            dq: -c * ddr,
            x: norm_c * j,
            dx: norm_c * s * dj,
        }
    }
}

/// Radial factors sampled on the quadrature nodes.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RadialProfile {
    pub p: Vec<f64>,
    pub dp: Vec<f64>,
    pub q: Vec<f64>,
    pub dq: Vec<f64>,
    pub x: Vec<f64>,
    pub dx: Vec<f64>,
    /// `Q(1)`: tangential velocity factor on the circle.
    pub q_boundary: f64,
    /// `P(1)`: normal velocity factor on the circle (zero up to roundoff).
    pub p_boundary: f64,
    /// `X(1)`: vorticity factor on the circle.
    pub x_boundary: f64,
}

/// Angular factors sampled on the quadrature nodes.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct AngularProfile {
    pub f: Vec<f64>,
    pub df: Vec<f64>,
}

/// Truncated eigenbasis, sorted by ascending eigenvalue.
#[derive(Debug, Clone)]
pub struct Basis {
    domain: DomainSpec,
    pairs: Vec<EigenPair>,
    grid: QuadratureGrid,
    checksum: String,
    tangencies: Vec<TangencyFlag>,
    velocity_gram_deviation: f64,
    pub(crate) radial: Vec<RadialProfile>,
    pub(crate) angular: Vec<AngularProfile>,
}

impl PartialEq for Basis {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain
            && self.grid == other.grid
            && self.checksum == other.checksum
            && self.pairs.len() == other.pairs.len()
            && self
                .pairs
                .iter()
                .zip(&other.pairs)
                .all(|(a, b)| pair_bits(a) == pair_bits(b))
    }
}

fn pair_bits(p: &EigenPair) -> (u32, Parity, u64, u64, u64, u64) {
    (
        p.n,
        p.parity,
        p.s.to_bits(),
        p.lambda.to_bits(),
        p.norm_c.to_bits(),
        p.mu.to_bits(),
    )
}

/// Unnormalized mode before quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSeed {
    pub n: u32,
    pub parity: Parity,
    pub s: f64,
}

/// The first `k` modes across all angular families, ascending in `λ`
/// (ties: lower `n` first, cosine before sine), plus any tangency flags.
pub fn enumerate_modes(k: usize, domain: &DomainSpec) -> Result<(Vec<ModeSeed>, Vec<TangencyFlag>)> {
    if k == 0 {
        return Err(Error::Config("basis size K must be at least 1".into()));
    }
    // Weyl: about s²/4 eigenvalues below s².
    let mut s_max = (2.0 * (k as f64).sqrt() + 6.0).min(MAX_ARG);
    loop {
        let mut seeds = Vec::new();
        let mut flags = Vec::new();
        // Families with n > s_max + 1 have no roots below s_max.
        let n_top = ((s_max.ceil() as u32) + 1).min(MAX_ORDER);
        for n in 0..=n_top {
            let scan = secular::find_roots(n, s_max, domain.alpha())?;
            flags.extend(scan.tangencies);
            for s in scan.roots {
                seeds.push(ModeSeed {
                    n,
                    parity: Parity::Cos,
                    s,
                });
                if n > 0 {
                    seeds.push(ModeSeed {
                        n,
                        parity: Parity::Sin,
                        s,
                    });
                }
            }
        }
        if seeds.len() >= k {
            seeds.sort_by(|a, b| {
                (a.s * a.s)
                    .total_cmp(&(b.s * b.s))
                    .then(a.n.cmp(&b.n))
                    .then(a.parity.cmp(&b.parity))
            });
            seeds.truncate(k);
            let s_top = seeds.last().map_or(0.0, |m| m.s);
            flags.retain(|f| f.s <= s_top);
            return Ok((seeds, flags));
        }
        if s_max >= MAX_ARG {
            return Err(Error::Range(format!(
                "only {} modes below s = {MAX_ARG}, requested {k}",
                seeds.len()
            )));
        }
        s_max = (1.5 * s_max).min(MAX_ARG);
    }
}

/// Builds the first `k` modes on the given grid.
pub fn build_basis(k: usize, domain: DomainSpec, grid: QuadratureGrid) -> Result<Basis> {
    let (seeds, flags) = enumerate_modes(k, &domain)?;
    let mut basis = Basis::assemble(domain, &seeds, grid, None)?;
    basis.tangencies = flags;
    Ok(basis)
}

impl Basis {
    /// Builds with a grid sized for the modes actually selected.
    pub fn build_auto(k: usize, domain: DomainSpec) -> Result<Self> {
        let (seeds, flags) = enumerate_modes(k, &domain)?;
        let n_max = seeds.iter().map(|m| m.n).max().unwrap_or(0);
        let s_max = seeds.iter().map(|m| m.s).fold(0.0, f64::max);
        let grid = QuadratureGrid::sized_for(n_max, s_max);
        let mut basis = Self::assemble(domain, &seeds, grid, None)?;
        basis.tangencies = flags;
        Ok(basis)
    }

    /// Rebuilds a basis from stored pairs without re-normalizing, so every
    /// stored field survives bit-for-bit.
    pub fn from_pairs(domain: DomainSpec, pairs: &[EigenPair], grid: QuadratureGrid) -> Result<Self> {
        let seeds: Vec<ModeSeed> = pairs
            .iter()
            .map(|p| ModeSeed {
                n: p.n,
                parity: p.parity,
                s: p.s,
            })
            .collect();
        Self::assemble(domain, &seeds, grid, Some(pairs))
    }

    fn assemble(
        domain: DomainSpec,
        seeds: &[ModeSeed],
        grid: QuadratureGrid,
        stored: Option<&[EigenPair]>,
    ) -> Result<Self> {
        if seeds.is_empty() {
            return Err(Error::Config("basis size K must be at least 1".into()));
        }
        let n_max = seeds.iter().map(|m| m.n).max().unwrap_or(0);
        if grid.ntheta() < QuadratureGrid::min_ntheta(n_max) {
            return Err(Error::Config(format!(
                "Ntheta = {} is below 3 n_max + 2 = {} for n_max = {n_max}",
                grid.ntheta(),
                QuadratureGrid::min_ntheta(n_max)
            )));
        }

        let mut pairs = Vec::with_capacity(seeds.len());
        let mut angular = Vec::with_capacity(seeds.len());
        for (i, seed) in seeds.iter().enumerate() {
            if seed.n > MAX_ORDER || !(seed.s > 0.0 && seed.s <= MAX_ARG) {
                return Err(Error::Range(format!("mode {i} out of range: {seed:?}")));
            }
            let (f, df): (Vec<f64>, Vec<f64>) = grid.theta_nodes().iter().map(|&t| seed.parity.eval(seed.n, t)).unzip();
            let ang = grid.angular_integral(f.iter().map(|v| v * v));
            let pair = match stored {
                Some(p) => p[i],
                None => {
                    // ‖v‖² = ∫ ξ ψ since ψ vanishes on the circle.
                    let raw = grid.radial_integral(grid.r_nodes().iter().map(|&r| {
                        let v = RadialValues::at(seed.n, seed.s, 1.0, r);
                        v.x * v.psi
                    })) * ang;
                    if !(raw > 0.0) {
                        return Err(Error::GridTooCoarse {
                            what: "mode energy",
                            deviation: raw,
                            limit: 0.0,
                        });
                    }
                    let norm_c = 1.0 / raw.sqrt();
                    let enstrophy = grid.radial_integral(grid.r_nodes().iter().map(|&r| {
                        let x = norm_c * bessel::jn(seed.n, seed.s * r);
                        x * x
                    })) * ang;
                    EigenPair {
                        n: seed.n,
                        parity: seed.parity,
                        s: seed.s,
                        lambda: seed.s * seed.s,
                        norm_c,
                        mu: enstrophy.sqrt(),
                    }
                }
            };
            if !(pair.lambda > 0.0) {
                return Err(Error::Domain(format!(
                    "mode {i} has nonpositive eigenvalue {}",
                    pair.lambda
                )));
            }
            pairs.push(pair);
            angular.push(AngularProfile { f, df });
        }

        let radial = pairs.iter().map(|p| radial_profile(p, &grid)).collect();
        let checksum = pairs_checksum(&pairs);
        let mut basis = Self {
            domain,
            pairs,
            grid,
            checksum,
            tangencies: Vec::new(),
            velocity_gram_deviation: 0.0,
            radial,
            angular,
        };
        let dev = max_identity_deviation(&basis.velocity_gram());
        if dev > GRAM_LIMIT {
            return Err(Error::GridTooCoarse {
                what: "velocity Gram",
                deviation: dev,
                limit: GRAM_LIMIT,
            });
        }
        basis.velocity_gram_deviation = dev;
        Ok(basis)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn pairs(&self) -> &[EigenPair] {
        &self.pairs
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    /// Hex SHA-256 of the canonical pair list.
    pub fn checksum(&self) -> &str {
        &self.checksum
    }

    pub fn tangencies(&self) -> &[TangencyFlag] {
        &self.tangencies
    }

    /// Max `|⟨v_j, v_k⟩ − δ_jk|` measured at build time.
    pub fn velocity_gram_deviation(&self) -> f64 {
        self.velocity_gram_deviation
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.lambda).collect()
    }

    pub fn n_max(&self) -> u32 {
        self.pairs.iter().map(|p| p.n).max().unwrap_or(0)
    }

    fn ang(&self, a: &[f64], b: &[f64]) -> f64 {
        self.grid.angular_integral(a.iter().zip(b).map(|(x, y)| x * y))
    }

    fn rad(&self, a: &[f64], b: &[f64]) -> f64 {
        self.grid.radial_integral(a.iter().zip(b).map(|(x, y)| x * y))
    }

    /// `⟨v_j, v_k⟩_{L²}` by quadrature.
    pub fn velocity_gram(&self) -> Vec<Vec<f64>> {
        self.gram_with(|b, j, k| {
            let (rj, rk) = (&b.radial[j], &b.radial[k]);
            let (aj, ak) = (&b.angular[j], &b.angular[k]);
            b.rad(&rj.p, &rk.p) * b.ang(&aj.df, &ak.df) + b.rad(&rj.q, &rk.q) * b.ang(&aj.f, &ak.f)
        })
    }

    /// `⟨ζ_j, ζ_k⟩_{L²}` with `ζ_k = curl v_k / μ_k`.
    ///
    /// This is the identity only in the Lions case `α = 2`. Otherwise entries
    /// within one `(n, parity)` family equal
    /// `normC_j normC_k J_n(s_j) J_n(s_k) ∫trig² / ((2 − α) μ_j μ_k)`,
    /// see [`Basis::vorticity_gram_closed_form`].
    pub fn vorticity_gram(&self) -> Vec<Vec<f64>> {
        self.gram_with(|b, j, k| {
            let (rj, rk) = (&b.radial[j], &b.radial[k]);
            let (aj, ak) = (&b.angular[j], &b.angular[k]);
            b.rad(&rj.x, &rk.x) * b.ang(&aj.f, &ak.f) / (b.pairs[j].mu * b.pairs[k].mu)
        })
    }

    /// Green's-identity value of [`Basis::vorticity_gram`]: off-diagonal
    /// entries from boundary data alone, diagonal ones equal to 1.
    /// Returns `None` in the Lions case where the formula degenerates (and
    /// the Gram matrix is the identity).
    pub fn vorticity_gram_closed_form(&self) -> Option<Vec<Vec<f64>>> {
        let coupling = self.domain.vorticity_coupling();
        if coupling == 0.0 {
            return None;
        }
        let k = self.len();
        let mut g = alloc::vec![alloc::vec![0.0; k]; k];
        for i in 0..k {
            for j in 0..k {
                let (a, b) = (&self.pairs[i], &self.pairs[j]);
                g[i][j] = if i == j {
                    1.0
                } else if a.n == b.n && a.parity == b.parity {
                    let ang = if a.n == 0 {
                        2.0 * core::f64::consts::PI
                    } else {
                        core::f64::consts::PI
                    };
                    self.radial[i].x_boundary * self.radial[j].x_boundary * ang / (coupling * a.mu * b.mu)
                } else {
                    0.0
                };
            }
        }
        Some(g)
    }

    /// `∫ ∇v_j : ∇v_k` (full velocity gradient) by quadrature.
    pub fn gradient_gram(&self) -> Vec<Vec<f64>> {
        let g1: Vec<Vec<f64>> = self.radial.iter().map(|r| r.dp.clone()).collect();
        let (g2, g4): (Vec<Vec<f64>>, Vec<Vec<f64>>) = self
            .radial
            .iter()
            .zip(&self.pairs)
            .map(|(rp, pair)| {
                let n2 = (pair.n * pair.n) as f64;
                let mut a = Vec::with_capacity(rp.p.len());
                let mut b = Vec::with_capacity(rp.p.len());
                for (i, &r) in self.grid.r_nodes().iter().enumerate() {
                    a.push((-n2 * rp.p[i] - rp.q[i]) / r);
                    b.push((rp.q[i] + rp.p[i]) / r);
                }
                (a, b)
            })
            .unzip();
        self.gram_with(|b, j, k| {
            let (aj, ak) = (&b.angular[j], &b.angular[k]);
            let dd = b.ang(&aj.df, &ak.df);
            let ff = b.ang(&aj.f, &ak.f);
            (b.rad(&g1[j], &g1[k]) + b.rad(&g4[j], &g4[k])) * dd
                + (b.rad(&g2[j], &g2[k]) + b.rad(&b.radial[j].dq, &b.radial[k].dq)) * ff
        })
    }

    fn gram_with(&self, entry: impl Fn(&Self, usize, usize) -> f64) -> Vec<Vec<f64>> {
        let k = self.len();
        let mut g = alloc::vec![alloc::vec![0.0; k]; k];
        for i in 0..k {
            for j in i..k {
                let v = entry(self, i, j);
                g[i][j] = v;
                g[j][i] = v;
            }
        }
        g
    }

    /// Per mode: sup over boundary nodes of `|ξ_k − (2κ − α) u_k·t|`.
    pub fn boundary_identity_residuals(&self) -> Vec<f64> {
        let coupling = self.domain.vorticity_coupling();
        self.radial
            .iter()
            .zip(&self.angular)
            .map(|(rp, ap)| {
                let amp = (rp.x_boundary - coupling * rp.q_boundary).abs();
                amp * ap.f.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            })
            .collect()
    }

    /// Per mode: sup over boundary nodes of `|u_k·n|`.
    pub fn normal_velocity_residuals(&self) -> Vec<f64> {
        self.radial
            .iter()
            .zip(&self.angular)
            .map(|(rp, ap)| rp.p_boundary.abs() * ap.df.iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .collect()
    }

    /// Grid estimate of `‖∇v_k‖_∞` per mode.
    pub fn gradient_sup(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for (k, pair) in self.pairs.iter().enumerate() {
            let rp = &self.radial[k];
            let ap = &self.angular[k];
            let n2 = (pair.n * pair.n) as f64;
            let mut best = 0.0f64;
            for (i, &r) in self.grid.r_nodes().iter().enumerate() {
                let a = (-n2 * rp.p[i] - rp.q[i]) / r;
                let b = (rp.q[i] + rp.p[i]) / r;
                let rad_f = a * a + rp.dq[i] * rp.dq[i];
                let rad_df = rp.dp[i] * rp.dp[i] + b * b;
                for (f, df) in ap.f.iter().zip(&ap.df) {
                    best = best.max(rad_f * f * f + rad_df * df * df);
                }
            }
            out.push(best.sqrt());
        }
        out
    }

    /// Values of mode `k` at `(r, θ)`.
    pub fn mode_at(&self, k: usize, r: f64, theta: f64) -> FieldSample {
        let p = &self.pairs[k];
        let v = RadialValues::at(p.n, p.s, p.norm_c, r);
        let (f, df) = p.parity.eval(p.n, theta);
        FieldSample {
            psi: v.psi * f,
            u_r: v.p * df,
            u_theta: v.q * f,
            xi: v.x * f,
        }
    }

    /// Values of `u = Σ c_k v_k` at `(r, θ)`.
    pub fn field_at(&self, coeffs: &[f64], r: f64, theta: f64) -> FieldSample {
        let mut out = FieldSample::default();
        for (k, &c) in coeffs.iter().enumerate().take(self.len()) {
            if c == 0.0 {
                continue;
            }
            let m = self.mode_at(k, r, theta);
            out.psi += c * m.psi;
            out.u_r += c * m.u_r;
            out.u_theta += c * m.u_theta;
            out.xi += c * m.xi;
        }
        out
    }

    /// `(ξ, ∂_r ξ, ∂_θ ξ / r)` radial profile data for the H¹ norm of `ξ_k`.
    pub(crate) fn vorticity_h1_squared(&self, k: usize) -> (f64, f64) {
        let rp = &self.radial[k];
        let ap = &self.angular[k];
        let ff = self.ang(&ap.f, &ap.f);
        let dd = self.ang(&ap.df, &ap.df);
        let l2 = self.rad(&rp.x, &rp.x) * ff;
        let x_over_r: Vec<f64> = rp.x.iter().zip(self.grid.r_nodes()).map(|(x, r)| x / r).collect();
        let grad = self.rad(&rp.dx, &rp.dx) * ff + self.rad(&x_over_r, &x_over_r) * dd;
        (l2, grad)
    }
}

fn radial_profile(pair: &EigenPair, grid: &QuadratureGrid) -> RadialProfile {
    let nr = grid.nr();
    let mut prof = RadialProfile {
        p: Vec::with_capacity(nr),
        dp: Vec::with_capacity(nr),
        q: Vec::with_capacity(nr),
        dq: Vec::with_capacity(nr),
        x: Vec::with_capacity(nr),
        dx: Vec::with_capacity(nr),
        q_boundary: 0.0,
        p_boundary: 0.0,
        x_boundary: 0.0,
    };
    for &r in grid.r_nodes() {
        let v = RadialValues::at(pair.n, pair.s, pair.norm_c, r);
        prof.p.push(v.p);
        prof.dp.push(v.dp);
        prof.q.push(v.q);
        prof.dq.push(v.dq);
        prof.x.push(v.x);
        prof.dx.push(v.dx);
    }
    let edge = RadialValues::at(pair.n, pair.s, pair.norm_c, 1.0);
    prof.q_boundary = edge.q;
    prof.p_boundary = edge.p;
    prof.x_boundary = edge.x;
    prof
}

/// Max `|G_jk − δ_jk|`.
pub fn max_identity_deviation(g: &[Vec<f64>]) -> f64 {
    let mut dev = 0.0f64;
    for (i, row) in g.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((v - target).abs());
        }
    }
    dev
}

/// One line per pair, numbers with 17 significant digits.
pub fn canonical_pairs(pairs: &[EigenPair]) -> String {
    let mut out = String::new();
    for p in pairs {
        let _ = writeln!(
            out,
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            p.n,
            p.parity.as_str(),
            p.s,
            p.lambda,
            p.norm_c,
            p.mu
        );
    }
    out
}

/// Lower-case hex SHA-256 of [`canonical_pairs`].
pub fn pairs_checksum(pairs: &[EigenPair]) -> String {
    hex_digest(canonical_pairs(pairs).as_bytes())
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest.iter() {
        let _ = write!(out, "{b:02x}");
    }
    out
}
