//! Domain model, boundary and strip samplers, adapted frames and the Levi form.

use std::io::Write;

use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hermitian::{gram_schmidt_frame, CMatrix, HermitianMatrix};
use crate::poly::{Monomial, WirtingerPoly};

pub type Point = Vec<Complex64>;

/// Gradients below this norm do not define a boundary frame.
pub const DEGENERATE_GRADIENT: f64 = 1e-10;

/// A real polynomial together with its cached Wirtinger derivatives.
#[derive(Clone, Debug)]
pub struct PolyJet {
    value: WirtingerPoly,
    grad: Vec<WirtingerPoly>,
    hess: Vec<Vec<WirtingerPoly>>,
}

impl PolyJet {
    pub fn new(p: &WirtingerPoly) -> Result<Self> {
        if !p.is_real() {
            return Err(Error::NotReal(format!("{p}")));
        }
        let n = p.n();
        let grad = (0..n).map(|i| p.derive(i, false)).collect::<Result<Vec<_>>>()?;
        let hess = grad
            .iter()
            .map(|g| (0..n).map(|j| g.derive(j, true)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyJet {
            value: p.clone(),
            grad,
            hess,
        })
    }

    pub fn poly(&self) -> &WirtingerPoly {
        &self.value
    }

    pub fn value(&self, z: &[Complex64]) -> Result<f64> {
        self.value.evaluate_real(z)
    }

    /// `(dp/dz_1, ..., dp/dz_n)`.
    pub fn gradient(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        self.grad.iter().map(|g| g.evaluate(z)).collect()
    }

    /// Entry `(i, j)` is `d^2 p / dz_i dzbar_j`.
    pub fn hessian(&self, z: &[Complex64]) -> Result<HermitianMatrix> {
        let n = self.value.n();
        let mut data = Vec::with_capacity(n * n);
        for row in &self.hess {
            for h in row {
                data.push(h.evaluate(z)?);
            }
        }
        HermitianMatrix::from_row_major(n, data)
    }
}

/// Complex Hessian `(d^2 p / dz_i dzbar_j)` of a real polynomial at `z`.
pub fn complex_hessian(p: &WirtingerPoly, z: &[Complex64]) -> Result<HermitianMatrix> {
    PolyJet::new(p)?.hessian(z)
}

/// Domain `{r < 0}` near the origin, which is a boundary point.
#[derive(Clone, Debug)]
pub struct DomainSpec {
    n: usize,
    jet: PolyJet,
    graph_form: bool,
    radius: f64,
}

impl DomainSpec {
    /// Validates `r` (real, `r(0) = 0`, `dr(0) != 0`; graph form `2 Re z_n + h`
    /// with `h` independent of `x_n`) and caches its derivatives.
    pub fn new(r: WirtingerPoly, graph_form: bool, radius: f64) -> Result<Self> {
        let n = r.n();
        if n < 2 {
            return Err(Error::InvalidDomain(format!("need at least two variables, got {n}")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidDomain(format!("neighborhood radius must be positive, got {radius}")));
        }
        if !r.is_real() {
            return Err(Error::InvalidDomain(format!("defining function is not real-valued: {r}")));
        }
        if !r.coeff(&Monomial::one(n)).is_zero() {
            return Err(Error::InvalidDomain("r(0) != 0: the origin is not a boundary point".into()));
        }
        if !r.terms().any(|(m, _)| m.degree() == 1) {
            return Err(Error::InvalidDomain("dr(0) = 0: the origin is not a smooth boundary point".into()));
        }
        if graph_form {
            let zn = WirtingerPoly::two_re(n, n - 1);
            let mut lin = Monomial::one(n);
            lin.z[n - 1] = 1;
            if !r.coeff(&lin).is_one() {
                return Err(Error::InvalidDomain("graph form needs coefficient 1 on z_n".into()));
            }
            let h = &r - &zn;
            if !h.derive_x(n - 1)?.is_zero() {
                return Err(Error::InvalidDomain("graph form needs h independent of x_n".into()));
            }
        }
        Ok(DomainSpec {
            n,
            jet: PolyJet::new(&r)?,
            graph_form,
            radius,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> &WirtingerPoly {
        self.jet.poly()
    }

    pub fn jet(&self) -> &PolyJet {
        &self.jet
    }

    pub fn graph_form(&self) -> bool {
        self.graph_form
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn value(&self, z: &[Complex64]) -> Result<f64> {
        self.jet.value(z)
    }

    pub fn gradient(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        self.jet.gradient(z)
    }

    pub fn hessian(&self, z: &[Complex64]) -> Result<HermitianMatrix> {
        self.jet.hessian(z)
    }

    pub fn in_polydisc(&self, z: &[Complex64]) -> bool {
        z.iter().all(|c| c.norm() <= self.radius)
    }

    /// Projection along the x_n axis onto `{r = 0}` (graph form only).
    pub fn boundary_projection(&self, z: &[Complex64]) -> Result<Point> {
        if !self.graph_form {
            return Err(Error::InvalidArgument("boundary projection needs graph form".into()));
        }
        let mut p = z.to_vec();
        let last = self.n - 1;
        p[last] = Complex64::new(0.0, z[last].im);
        let h = self.value(&p)?;
        p[last].re = -h / 2.0;
        Ok(p)
    }

    /// Half the vanishing order of `r` restricted to the j-th coordinate axis.
    pub fn axis_half_order(&self, j: usize) -> Result<u32> {
        let order = self.r().restrict_to_axis(j).vanishing_order()?;
        Ok(order / 2)
    }
}

/// Points of the collar `{-delta < r < 0}`.
#[derive(Clone, Debug)]
pub struct StripSample {
    pub points: Vec<Point>,
    pub delta: f64,
    pub r_values: Vec<f64>,
}

/// Radial law for the tangential coordinates.
///
/// With probability `axis_fraction` a coordinate is drawn with log-uniform
/// modulus on `[radius * axis_floor, radius]`, which puts samples near the
/// coordinate hyperplanes where the weak directions of the model domains live.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplerConfig {
    pub axis_fraction: f64,
    pub axis_floor: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            axis_fraction: 0.5,
            axis_floor: 1e-4,
        }
    }
}

impl SamplerConfig {
    pub fn uniform() -> Self {
        SamplerConfig {
            axis_fraction: 0.0,
            axis_floor: 1e-4,
        }
    }
}

const MAX_ATTEMPTS: usize = 1000;
const BISECTION_STEPS: usize = 200;

#[derive(Clone, Copy)]
enum Stream {
    Boundary = 1,
    Strip = 2,
    Region = 3,
}

/// Each sample index draws from its own ChaCha stream, so samples can be
/// generated in any order or split across workers.
fn sample_rng(seed: u64, kind: Stream, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((kind as u64) << 48) | index as u64);
    rng
}

fn tangential_coordinate(rng: &mut ChaCha8Rng, radius: f64, cfg: &SamplerConfig) -> Complex64 {
    let angle = rng.random::<f64>() * std::f64::consts::TAU;
    let modulus = if rng.random::<f64>() < cfg.axis_fraction {
        radius * (rng.random::<f64>() * cfg.axis_floor.ln()).exp()
    } else {
        radius * rng.random::<f64>().sqrt()
    };
    Complex64::from_polar(modulus, angle)
}

fn draw_base(spec: &DomainSpec, rng: &mut ChaCha8Rng, cfg: &SamplerConfig) -> Point {
    let n = spec.n;
    let rho = spec.radius;
    let mut p: Point = (0..n - 1).map(|_| tangential_coordinate(rng, rho, cfg)).collect();
    p.push(Complex64::new(0.0, rho * (2.0 * rng.random::<f64>() - 1.0)));
    p
}

/// Boundary point along the x_n line through `base`, or `None` if the line misses it.
fn boundary_on_line(spec: &DomainSpec, base: &Point) -> Result<Option<Point>> {
    let last = spec.n - 1;
    if spec.graph_form {
        return spec.boundary_projection(base).map(Some);
    }
    let rho = spec.radius;
    let at = |x: f64| -> Result<f64> {
        let mut p = base.clone();
        p[last].re = x;
        spec.value(&p)
    };
    let grid = 64;
    let mut lo = -rho;
    let mut f_lo = at(lo)?;
    for i in 1..=grid {
        let hi = -rho + 2.0 * rho * i as f64 / grid as f64;
        let f_hi = at(hi)?;
        if f_lo == 0.0 {
            let mut p = base.clone();
            p[last].re = lo;
            return Ok(Some(p));
        }
        if f_lo.signum() != f_hi.signum() {
            let (mut a, mut b, mut fa) = (lo, hi, f_lo);
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let fm = at(mid)?;
                if fm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if fm.signum() == fa.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            let x = if at(a)?.abs() <= at(b)?.abs() { a } else { b };
            let mut p = base.clone();
            p[last].re = x;
            return Ok(Some(p));
        }
        lo = hi;
        f_lo = f_hi;
    }
    Ok(None)
}

fn boundary_point(spec: &DomainSpec, rng: &mut ChaCha8Rng, cfg: &SamplerConfig) -> Result<Point> {
    for _ in 0..MAX_ATTEMPTS {
        let base = draw_base(spec, rng, cfg);
        if let Some(p) = boundary_on_line(spec, &base)? {
            if spec.in_polydisc(&p) {
                return Ok(p);
            }
        }
    }
    Err(Error::Sampling(format!(
        "no boundary point found in the polydisc of radius {} after {MAX_ATTEMPTS} attempts",
        spec.radius
    )))
}

/// `count` points on `{r = 0}` inside the polydisc of radius `rho`.
pub fn boundary_sample(spec: &DomainSpec, count: usize, seed: u64, cfg: &SamplerConfig) -> Result<Vec<Point>> {
    (0..count)
        .map(|i| boundary_point(spec, &mut sample_rng(seed, Stream::Boundary, i), cfg))
        .collect()
}

/// Moves `p` inward along x_n until `r(p) = -target` (graph form is exact).
fn push_inward(spec: &DomainSpec, p: &Point, target: f64) -> Result<Option<Point>> {
    let last = spec.n - 1;
    let mut q = p.clone();
    if spec.graph_form {
        q[last].re -= target / 2.0;
        return Ok(Some(q));
    }
    // d r / d x_n = 2 Re(d r / d z_n)
    let slope = 2.0 * spec.gradient(p)?[last].re;
    if slope.abs() < DEGENERATE_GRADIENT {
        return Ok(None);
    }
    q[last].re -= target / slope;
    Ok(Some(q))
}

fn strip_point(spec: &DomainSpec, delta: f64, rng: &mut ChaCha8Rng, cfg: &SamplerConfig) -> Result<(Point, f64)> {
    for _ in 0..MAX_ATTEMPTS {
        let b = boundary_point(spec, rng, cfg)?;
        let u: f64 = rng.random();
        if u == 0.0 {
            continue;
        }
        if let Some(q) = push_inward(spec, &b, u * delta)? {
            let r = spec.value(&q)?;
            if -delta < r && r < 0.0 && spec.in_polydisc(&q) {
                return Ok((q, r));
            }
        }
    }
    Err(Error::Sampling(format!(
        "strip of depth {delta:e}: rejection sampling exhausted after {MAX_ATTEMPTS} attempts"
    )))
}

/// `count` points of `S_delta = {-delta < r < 0}` in the polydisc.
///
/// Graph form: a boundary point shifted by `u * delta / 2` in `-x_n`, so
/// `r = -u * delta` with `u` uniform on `(0, 1)`.
pub fn strip_sample(spec: &DomainSpec, delta: f64, count: usize, seed: u64, cfg: &SamplerConfig) -> Result<StripSample> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("strip depth must be positive, got {delta}")));
    }
    let mut points = Vec::with_capacity(count);
    let mut r_values = Vec::with_capacity(count);
    for i in 0..count {
        let (p, r) = strip_point(spec, delta, &mut sample_rng(seed, Stream::Strip, i), cfg)?;
        points.push(p);
        r_values.push(r);
    }
    Ok(StripSample { points, delta, r_values })
}

/// `count` points of the closed domain `{r <= 0}` within the polydisc.
///
/// Graph form: x_n is drawn uniformly between `-rho` and its boundary value.
pub fn region_sample(spec: &DomainSpec, count: usize, seed: u64, cfg: &SamplerConfig) -> Result<Vec<Point>> {
    let rho = spec.radius;
    let last = spec.n - 1;
    (0..count)
        .map(|i| {
            let mut rng = sample_rng(seed, Stream::Region, i);
            for _ in 0..MAX_ATTEMPTS {
                let mut p = if spec.graph_form {
                    let b = boundary_point(spec, &mut rng, cfg)?;
                    let mut p = b.clone();
                    let top = b[last].re;
                    p[last].re = top - rng.random::<f64>() * (top + rho).max(0.0);
                    p
                } else {
                    let mut p = draw_base(spec, &mut rng, cfg);
                    p[last].re = rho * (2.0 * rng.random::<f64>() - 1.0);
                    p
                };
                if !spec.in_polydisc(&p) {
                    continue;
                }
                let r = spec.value(&p)?;
                if r > 0.0 {
                    if spec.graph_form {
                        // rounding at the boundary itself
                        p = spec.boundary_projection(&p)?;
                    } else {
                        continue;
                    }
                }
                return Ok(p);
            }
            Err(Error::Sampling(format!(
                "domain sample exhausted after {MAX_ATTEMPTS} attempts"
            )))
        })
        .collect()
}

/// Orthonormal frame whose last column is `dr / |dr|`, completed from the
/// standard basis. The first n-1 columns span the complex tangent directions.
pub fn adapted_frame(spec: &DomainSpec, z: &[Complex64]) -> Result<CMatrix> {
    let g = spec.gradient(z)?;
    let norm = g.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > DEGENERATE_GRADIENT) {
        return Err(Error::DegenerateGradient { norm });
    }
    gram_schmidt_frame(&g)
}

/// Levi form `B^* H B` at `z`, `B` the tangential columns of the adapted frame.
pub fn levi_form(spec: &DomainSpec, z: &[Complex64]) -> Result<HermitianMatrix> {
    let frame = adapted_frame(spec, z)?;
    let b = frame.leading_columns(spec.n - 1);
    Ok(spec.hessian(z)?.compress(&b))
}

/// Unitary re-mixing `W` of the tangential frame columns: the frame used for
/// traces over the first `q_o` directions is `[B W, dr/|dr|]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FramePolicy {
    rotation: CMatrix,
}

impl FramePolicy {
    pub fn identity(n: usize) -> Self {
        FramePolicy {
            rotation: CMatrix::identity(n - 1),
        }
    }

    /// Column `i` of the policy frame is tangential column `perm[i]` (0-based).
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let k = perm.len();
        let mut seen = vec![false; k];
        for &p in perm {
            if p >= k || seen[p] {
                return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        let mut w = CMatrix::zeros(k, k);
        for (i, &p) in perm.iter().enumerate() {
            w[(p, i)] = Complex64::one();
        }
        Ok(FramePolicy { rotation: w })
    }

    /// Ascending-eigenvalue eigenvectors of the Levi form at the origin, frozen
    /// over the neighborhood. Ties keep coordinate order.
    pub fn base_point_eigenvectors(spec: &DomainSpec) -> Result<Self> {
        let origin = vec![Complex64::zero(); spec.n];
        let levi = levi_form(spec, &origin)?;
        Ok(FramePolicy {
            rotation: levi.eigh()?.vectors,
        })
    }

    pub fn rotation(&self) -> &CMatrix {
        &self.rotation
    }

    fn check(&self, spec: &DomainSpec) -> Result<()> {
        if self.rotation.rows() != spec.n - 1 {
            return Err(Error::DimensionMismatch {
                expected: spec.n - 1,
                got: self.rotation.rows(),
            });
        }
        Ok(())
    }

    /// Full n x n frame `[B W, dr/|dr|]` at `z`.
    pub fn frame(&self, spec: &DomainSpec, z: &[Complex64]) -> Result<CMatrix> {
        self.check(spec)?;
        let f = adapted_frame(spec, z)?;
        let n = spec.n;
        let bw = f.leading_columns(n - 1).matmul(&self.rotation);
        let mut cols: Vec<Vec<Complex64>> = (0..n - 1).map(|j| bw.column(j)).collect();
        cols.push(f.column(n - 1));
        Ok(CMatrix::from_columns(&cols))
    }

    /// Levi form in the policy frame, `W^* (B^* H B) W`.
    pub fn levi_form(&self, spec: &DomainSpec, z: &[Complex64]) -> Result<HermitianMatrix> {
        self.check(spec)?;
        Ok(levi_form(spec, z)?.compress(&self.rotation))
    }
}

/// CSV with columns `re_z1, im_z1, ..., re_zn, im_zn, r`.
pub fn write_samples_csv<W: Write>(spec: &DomainSpec, points: &[Point], mut out: W) -> Result<()> {
    let io = |e: std::io::Error| Error::InvalidArgument(format!("csv write failed: {e}"));
    let mut header: Vec<String> = (1..=spec.n)
        .flat_map(|j| [format!("re_z{j}"), format!("im_z{j}")])
        .collect();
    header.push("r".into());
    writeln!(out, "{}", header.join(",")).map_err(io)?;
    for p in points {
        let mut row: Vec<String> = p.iter().flat_map(|c| [format!("{:.17e}", c.re), format!("{:.17e}", c.im)]).collect();
        row.push(format!("{:.17e}", spec.value(p)?));
        writeln!(out, "{}", row.join(",")).map_err(io)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_expr;

    fn domain(n: usize, src: &str) -> DomainSpec {
        DomainSpec::new(parse_expr(n, src).unwrap(), true, 0.5).unwrap()
    }

    #[test]
    fn rejects_invalid_domains() {
        let p = |s: &str| parse_expr(2, s).unwrap();
        assert!(DomainSpec::new(p("z1"), false, 0.5).is_err());
        assert!(DomainSpec::new(p("re(2) + 1"), false, 0.5).is_err());
        assert!(DomainSpec::new(p("abs2m(1,1)"), false, 0.5).is_err());
        assert!(DomainSpec::new(p("2*re(2) + abs2m(1,1)"), true, 0.5).is_err());
        assert!(DomainSpec::new(p("re(2) + abs2m(2,1)"), true, 0.5).is_err());
        // y_n dependence is allowed in graph form
        assert!(DomainSpec::new(p("re(2) + abs2m(1,1) + (z2 - zb2)^2"), true, 0.5).is_ok());
        assert!(DomainSpec::new(p("re(2) + abs2m(1,1)"), true, 0.0).is_err());
    }

    #[test]
    fn boundary_samples_of_graph() {
        let spec = domain(2, "re(2) + abs2m(1,2)");
        let pts = boundary_sample(&spec, 50, 3, &SamplerConfig::default()).unwrap();
        for p in &pts {
            let h = p[0].norm().powi(4);
            assert!((p[1].re + h / 2.0).abs() < 1e-15);
            assert!(spec.value(p).unwrap().abs() <= 1e-12);
        }
        assert!(boundary_sample(&spec, 0, 3, &SamplerConfig::default()).unwrap().is_empty());
        let again = boundary_sample(&spec, 50, 3, &SamplerConfig::default()).unwrap();
        assert_eq!(pts, again);
    }

    #[test]
    fn non_graph_boundary_by_bisection() {
        let spec = DomainSpec::new(parse_expr(2, "re(2) + abs2m(1,1) + abs2m(2,1)").unwrap(), false, 0.5).unwrap();
        let pts = boundary_sample(&spec, 20, 1, &SamplerConfig::default()).unwrap();
        for p in &pts {
            assert!(spec.value(p).unwrap().abs() <= 1e-12);
        }
        let strip = strip_sample(&spec, 1e-3, 20, 1, &SamplerConfig::default()).unwrap();
        assert!(strip.r_values.iter().all(|&r| -1e-3 < r && r < 0.0));
    }

    #[test]
    fn strip_values_in_range() {
        let spec = domain(2, "re(2) + abs2m(1,1)");
        let delta = 2f64.powi(-10);
        let s = strip_sample(&spec, delta, 200, 9, &SamplerConfig::default()).unwrap();
        for (p, r) in s.points.iter().zip(&s.r_values) {
            assert!(-delta < *r && *r < 0.0);
            assert!(spec.in_polydisc(p));
        }
        assert!(strip_sample(&spec, 0.0, 1, 9, &SamplerConfig::default()).is_err());
    }

    #[test]
    fn hessian_examples() {
        let h = complex_hessian(&parse_expr(1, "abs2m(1,1)").unwrap(), &[Complex64::new(0.3, -0.2)]).unwrap();
        assert_eq!(h, HermitianMatrix::identity(1));
        let spec = domain(3, "re(3) + abs2m(1,1) - abs2m(2,1)");
        let origin = vec![Complex64::zero(); 3];
        assert_eq!(spec.hessian(&origin).unwrap(), HermitianMatrix::from_diag(&[1.0, -1.0, 0.0]));
        assert_eq!(levi_form(&spec, &origin).unwrap(), HermitianMatrix::from_diag(&[1.0, -1.0]));
    }

    #[test]
    fn frame_at_origin_is_identity() {
        let spec = domain(3, "re(3) + abs2m(1,1) - abs2m(2,1)");
        let f = adapted_frame(&spec, &[Complex64::zero(); 3]).unwrap();
        assert_eq!(f, CMatrix::identity(3));
    }

    #[test]
    fn frame_last_column_follows_gradient() {
        let spec = domain(2, "re(2) + abs2m(1,2)");
        let rho: f64 = 0.4;
        let z = vec![Complex64::new(rho, 0.0), Complex64::new(-rho.powi(4) / 2.0, 0.0)];
        let f = adapted_frame(&spec, &z).unwrap();
        let g = [2.0 * rho.powi(3), 1.0];
        let len = (g[0] * g[0] + g[1] * g[1]).sqrt();
        assert!((f[(0, 1)].re - g[0] / len).abs() < 1e-15);
        assert!((f[(1, 1)].re - g[1] / len).abs() < 1e-15);
        assert!(f.unitarity_residual() < 1e-12);
    }

    #[test]
    fn degenerate_gradient_is_an_error() {
        let spec = DomainSpec::new(parse_expr(2, "re(2) - abs2m(2,1)").unwrap(), false, 0.5).unwrap();
        // dr/dz_2 = 1 - zb_2 vanishes at z_2 = 1
        let z = vec![Complex64::zero(), Complex64::new(1.0, 0.0)];
        assert!(matches!(adapted_frame(&spec, &z), Err(Error::DegenerateGradient { .. })));
    }

    #[test]
    fn permutation_policy() {
        let spec = domain(3, "re(3) + abs2m(1,1) - 3*abs2m(2,1)");
        let pol = FramePolicy::permutation(&[1, 0]).unwrap();
        let l = pol.levi_form(&spec, &[Complex64::zero(); 3]).unwrap();
        assert_eq!(l, HermitianMatrix::from_diag(&[-3.0, 1.0]));
        assert!(FramePolicy::permutation(&[0, 0]).is_err());
        let eig = FramePolicy::base_point_eigenvectors(&spec).unwrap();
        assert_eq!(eig.levi_form(&spec, &[Complex64::zero(); 3]).unwrap(), l);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let spec = domain(2, "re(2) + abs2m(1,1)");
        let pts = boundary_sample(&spec, 3, 1, &SamplerConfig::default()).unwrap();
        let mut buf = Vec::new();
        write_samples_csv(&spec, &pts, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "re_z1,im_z1,re_z2,im_z2,r");
        assert_eq!(lines.len(), 4);
    }
}
