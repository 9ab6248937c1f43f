//! Critical radius of two-qubit states: closed form for T-states and
//! brackets from finite sets of projective measurements.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};

use crate::error::{invalid, mismatch, CoreError, Result};
use crate::linalg::{self, c, CMat};
use crate::operator::{bloch_decompose, DensityMatrix, MeasurementSet};
use crate::sdp::{Diagnostics, SdpConfig};
use crate::states::fibonacci_sphere;
use crate::steering::critical_alpha_capped;

/// Upper limit on the mixing parameter searched by the radius bounds. The
/// radius itself may exceed one (Werner states below 1/2).
pub const RADIUS_CAP: f64 = 10.0;

pub const DEFAULT_QUAD_POINTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub enum DirectionScheme {
    Paulis,
    Icosahedral6,
    DodecaIcosa15,
    Fibonacci(usize),
    Custom,
}

impl fmt::Display for DirectionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DirectionScheme::Paulis => f.write_str("paulis"),
            DirectionScheme::Icosahedral6 => f.write_str("icosa6"),
            DirectionScheme::DodecaIcosa15 => f.write_str("dodeca-icosa-15"),
            DirectionScheme::Fibonacci(n) => write!(f, "fib:{n}"),
            DirectionScheme::Custom => f.write_str("custom"),
        }
    }
}

/// Measurement axes; each axis stands for the pair `±n`.
#[derive(Debug, Clone)]
pub struct DirectionSet {
    axes: Vec<[f64; 3]>,
    scheme: DirectionScheme,
}

const GOLDEN: f64 = 1.618_033_988_749_895;

impl DirectionSet {
    pub fn new(axes: Vec<[f64; 3]>) -> Result<Self> {
        Self::with_scheme(axes, DirectionScheme::Custom)
    }

    fn with_scheme(raw: Vec<[f64; 3]>, scheme: DirectionScheme) -> Result<Self> {
        if raw.is_empty() {
            return invalid("direction set is empty");
        }
        let mut axes: Vec<[f64; 3]> = Vec::with_capacity(raw.len());
        for v in raw {
            let n = Vector3::from(v).norm();
            if !(n > 1e-12) || !n.is_finite() {
                return invalid("zero or non-finite axis");
            }
            let u = [v[0] / n, v[1] / n, v[2] / n];
            for w in &axes {
                let dot = (u[0] * w[0] + u[1] * w[1] + u[2] * w[2]).abs().min(1.0);
                if dot.acos() < 1e-9 {
                    return invalid(format!("duplicate axis {u:?}"));
                }
            }
            axes.push(u);
        }
        Ok(Self { axes, scheme })
    }

    pub fn paulis() -> Self {
        Self::with_scheme(
            vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            DirectionScheme::Paulis,
        )
        .expect("fixed axes")
    }

    /// The six vertex axes of the icosahedron.
    pub fn icosahedral6() -> Self {
        let p = GOLDEN;
        Self::with_scheme(
            vec![
                [0.0, 1.0, p],
                [0.0, 1.0, -p],
                [1.0, p, 0.0],
                [1.0, -p, 0.0],
                [p, 0.0, 1.0],
                [-p, 0.0, 1.0],
            ],
            DirectionScheme::Icosahedral6,
        )
        .expect("fixed axes")
    }

    /// The fifteen vertex axes of the icosidodecahedron, i.e. the edge
    /// midpoints of the icosahedron (equivalently of the dodecahedron).
    pub fn dodeca_icosa15() -> Self {
        let p = GOLDEN;
        let mut axes = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let base = [0.5, p / 2.0, p * p / 2.0];
        for shift in 0..3 {
            for s1 in [1.0, -1.0] {
                for s2 in [1.0, -1.0] {
                    let v = [base[0], s1 * base[1], s2 * base[2]];
                    axes.push([v[shift % 3], v[(shift + 1) % 3], v[(shift + 2) % 3]]);
                }
            }
        }
        Self::with_scheme(axes, DirectionScheme::DodecaIcosa15).expect("fixed axes")
    }

    /// `n` axes from a golden-angle spiral on the upper hemisphere.
    pub fn fibonacci(n: usize) -> Result<Self> {
        if n == 0 {
            return invalid("need at least one axis");
        }
        let pts = fibonacci_sphere(2 * n);
        Self::with_scheme(pts[..n].to_vec(), DirectionScheme::Fibonacci(n))
    }

    pub fn axes(&self) -> &[[f64; 3]] {
        &self.axes
    }

    pub fn scheme(&self) -> &DirectionScheme {
        &self.scheme
    }

    pub fn len(&self) -> usize {
        self.axes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }

    pub fn measurements(&self) -> MeasurementSet {
        MeasurementSet::from_axes(&self.axes).expect("unit axes")
    }

    /// Inradius of the convex hull of `{±n_i}`; zero when the axes are
    /// coplanar.
    pub fn inradius(&self) -> f64 {
        let pts: Vec<Vector3<f64>> = self
            .axes
            .iter()
            .flat_map(|a| {
                let v = Vector3::from(*a);
                [v, -v]
            })
            .collect();
        let mut best = f64::INFINITY;
        let n = pts.len();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let normal = (pts[j] - pts[i]).cross(&(pts[k] - pts[i]));
                    let len = normal.norm();
                    if len < 1e-12 {
                        continue;
                    }
                    let mut u = normal / len;
                    let mut h = u.dot(&pts[i]);
                    if h < 0.0 {
                        u = -u;
                        h = -h;
                    }
                    if h >= best {
                        continue;
                    }
                    // supporting plane: no point strictly beyond it
                    if pts.iter().all(|p| u.dot(p) <= h + 1e-12) {
                        best = h;
                    }
                }
            }
        }
        if best.is_finite() {
            best
        } else {
            0.0
        }
    }
}

impl FromStr for DirectionSet {
    type Err = CoreError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paulis" | "xyz" => Ok(Self::paulis()),
            "icosa6" => Ok(Self::icosahedral6()),
            "dodeca-icosa-15" => Ok(Self::dodeca_icosa15()),
            _ => {
                if let Some(n) = s.strip_prefix("fib:") {
                    let n: usize = n
                        .parse()
                        .map_err(|_| CoreError::InvalidInput(format!("bad axis count in '{s}'")))?;
                    Self::fibonacci(n)
                } else {
                    invalid(format!("unknown direction scheme '{s}'"))
                }
            }
        }
    }
}

/// Output of [`canonical_filter_form`].
#[derive(Debug, Clone)]
pub struct FilterForm {
    pub state: DensityMatrix,
    /// Bob's filter `F_B = (2ρ_B)^{−1/2}`.
    pub filter_b: CMat,
    pub unitary_a: CMat,
}

/// `(I ⊗ F_B) ρ (I ⊗ F_B)†` with `F_B = (2ρ_B)^{−1/2}`, which leaves Bob's
/// marginal maximally mixed. The normalization is automatically one.
pub fn canonical_filter_form(rho: &DensityMatrix) -> Result<FilterForm> {
    check_two_qubit(rho)?;
    let rb = linalg::partial_trace(rho.matrix(), (2, 2), linalg::Subsystem::A)?;
    if linalg::min_eig(&rb) < 1e-12 {
        return invalid("Bob's reduced state is singular");
    }
    let f = linalg::psd_power(&(rb * c(2.0, 0.0)), -0.5, 0.0);
    let big = linalg::kron(&linalg::identity(2), &f);
    let out = &big * rho.matrix() * big.adjoint();
    let t = linalg::trace_re(&out);
    Ok(FilterForm {
        state: DensityMatrix::raw(linalg::hermitian_part(&(out / c(t, 0.0)))),
        filter_b: f,
        unitary_a: linalg::identity(2),
    })
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return mismatch(format!("expected a two-qubit state, got dimension {}", rho.dim()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TstateRadius {
    pub radius: f64,
    /// `|R(N) − R(4N)|`.
    pub error_estimate: f64,
    /// `T` is singular and the formula does not apply; `radius` is `+∞`.
    pub singular: bool,
}

fn tstate_quadrature(tinv2: &Matrix3<f64>, det: f64, n: usize) -> f64 {
    let pts = fibonacci_sphere(n);
    let integral: f64 = pts
        .iter()
        .map(|p| {
            let v = Vector3::from(*p);
            (v.dot(&(tinv2 * v))).powi(-2)
        })
        .sum::<f64>()
        * (4.0 * std::f64::consts::PI / n as f64);
    2.0 * std::f64::consts::PI * det.abs() / integral
}

/// `R = 2π N_T |det T|` with `N_T⁻¹ = ∫ dS(n) (nᵀT⁻²n)⁻²`, integrated on a
/// Fibonacci sphere of `n` points. For a non-diagonal `T` the quadratic form
/// uses `(T Tᵀ)⁻¹`, which equals `T⁻²` for diagonal `T` and is unchanged by
/// local rotations.
pub fn tstate_critical_radius(t: &Matrix3<f64>, n: usize) -> Result<TstateRadius> {
    if n == 0 {
        return invalid("quadrature needs points");
    }
    let det = t.determinant();
    if det.abs() < 1e-12 {
        return Ok(TstateRadius {
            radius: f64::INFINITY,
            error_estimate: 0.0,
            singular: true,
        });
    }
    let tinv2 = (t * t.transpose())
        .try_inverse()
        .ok_or_else(|| CoreError::InvalidInput("singular T".into()))?;
    let r = tstate_quadrature(&tinv2, det, n);
    let fine = tstate_quadrature(&tinv2, det, 4 * n);
    Ok(TstateRadius {
        radius: r,
        error_estimate: (r - fine).abs(),
        singular: false,
    })
}

#[derive(Debug, Clone)]
pub struct RadiusUpper {
    pub value: f64,
    /// The search reached [`RADIUS_CAP`]; `value` is then `+∞`.
    pub capped: bool,
    pub diagnostics: Diagnostics,
}

/// Critical mixing over projective measurements along `dirs`: fewer
/// measurements make steering harder, so this bounds `R` from above.
pub fn radius_upper(rho: &DensityMatrix, dirs: &DirectionSet, cfg: &SdpConfig) -> Result<RadiusUpper> {
    check_two_qubit(rho)?;
    let rb = linalg::partial_trace(rho.matrix(), (2, 2), linalg::Subsystem::A)?;
    if linalg::min_eig(&rb) < 1e-12 {
        return invalid("Bob's reduced state is singular");
    }
    let ca = critical_alpha_capped(rho, &dirs.measurements(), RADIUS_CAP, cfg)?;
    Ok(RadiusUpper {
        value: if ca.capped { f64::INFINITY } else { ca.alpha },
        capped: ca.capped,
        diagnostics: ca.diagnostics,
    })
}

#[derive(Debug, Clone)]
pub struct RadiusBracket {
    pub lower: f64,
    pub upper: f64,
    pub inradius: f64,
    pub scheme: String,
    pub axes: usize,
    pub tol: f64,
    pub warnings: Vec<String>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiusClass {
    Steerable,
    Unsteerable,
    Undecided,
}

impl RadiusClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RadiusClass::Steerable => "steerable",
            RadiusClass::Unsteerable => "unsteerable",
            RadiusClass::Undecided => "undecided",
        }
    }
}

impl RadiusBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, r: f64, slack: f64) -> bool {
        self.lower - slack <= r && r <= self.upper + slack
    }

    /// `upper < 1` certifies steering with the listed axes; `lower ≥ 1`
    /// certifies an LHS model for every projective measurement.
    pub fn classify(&self) -> RadiusClass {
        if self.upper < 1.0 - self.tol {
            RadiusClass::Steerable
        } else if self.lower >= 1.0 + self.tol {
            RadiusClass::Unsteerable
        } else {
            RadiusClass::Undecided
        }
    }
}

/// `s · α_dirs`, with `s` the inradius of the hull of `{±n_i}`. An LHS model
/// for the listed axes covers their convex hull, every projective
/// measurement depolarized by `s` lies in that hull, and depolarizing
/// Alice's measurement by `s` maps `ρ^(α)` to `ρ^(sα)`.
pub fn radius_lower(rho: &DensityMatrix, dirs: &DirectionSet, cfg: &SdpConfig) -> Result<(f64, Vec<String>)> {
    let b = radius_bracket(rho, dirs, cfg)?;
    Ok((b.lower, b.warnings))
}

pub fn radius_bracket(rho: &DensityMatrix, dirs: &DirectionSet, cfg: &SdpConfig) -> Result<RadiusBracket> {
    let up = radius_upper(rho, dirs, cfg)?;
    let s = dirs.inradius();
    let mut warnings = Vec::new();
    if s == 0.0 {
        warnings.push("axes are coplanar; the hull has no interior and the lower bound is 0".into());
    }
    if up.capped {
        warnings.push(format!("critical mixing reached the search cap {RADIUS_CAP}"));
    }
    let known = if up.capped { RADIUS_CAP } else { up.value };
    let lower = (s * known).min(up.value);
    Ok(RadiusBracket {
        lower,
        upper: up.value,
        inradius: s,
        scheme: dirs.scheme().to_string(),
        axes: dirs.len(),
        tol: cfg.tol,
        warnings,
        diagnostics: up.diagnostics,
    })
}

/// Correlation matrix of a two-qubit state.
pub fn correlation_matrix(rho: &DensityMatrix) -> Result<Matrix3<f64>> {
    check_two_qubit(rho)?;
    Ok(bloch_decompose(rho)?.t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use crate::states::{one_way_state, singlet, werner, max_entangled};
    use proptest::prelude::*;

    #[test]
    fn werner_tstate_radius() {
        for eta in [0.3, 0.5, 0.8] {
            let r = tstate_critical_radius(&(Matrix3::identity() * -eta), DEFAULT_QUAD_POINTS).unwrap();
            assert!((r.radius - 1.0 / (2.0 * eta)).abs() < 1e-3);
            assert!(!r.singular);
        }
        let s = tstate_critical_radius(&Matrix3::from_diagonal(&Vector3::new(1.0, 0.5, 0.0)), 100).unwrap();
        assert!(s.singular && s.radius.is_infinite());
    }

    /// Independent evaluation: in the eigenbasis of `A = (TTᵀ)⁻¹` the azimuthal
    /// integral of `(nᵀAn)⁻²` is `2πP/((P−Q)(P+Q))^{3/2}`, leaving a 1D integral
    /// over `x = cos θ`, done here by adaptive Simpson.
    fn radius_by_reduction(t: &Matrix3<f64>) -> f64 {
        let a = (t * t.transpose()).try_inverse().unwrap().symmetric_eigenvalues();
        let (a1, a2, a3) = (a[0], a[1], a[2]);
        let f = |x: f64| {
            let s2 = 1.0 - x * x;
            let p = a3 * x * x + s2 * (a1 + a2) / 2.0;
            let lo = a3 * x * x + a2 * s2;
            let hi = a3 * x * x + a1 * s2;
            2.0 * std::f64::consts::PI * p / (lo * hi).powf(1.5)
        };
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() < 1e-13 * (left + right).abs() {
                return left + right;
            }
            simpson(f, a, m, fa, flm, fm, left, depth - 1) + simpson(f, m, b, fm, frm, fb, right, depth - 1)
        }
        let (fa, fm, fb) = (f(-1.0), f(0.0), f(1.0));
        let whole = 2.0 / 6.0 * (fa + 4.0 * fm + fb);
        let integral = simpson(&f, -1.0, 1.0, fa, fm, fb, whole, 40);
        2.0 * std::f64::consts::PI * t.determinant().abs() / integral
    }

    #[test]
    fn fibonacci_quadrature_matches_reduction() {
        let mut r = random::rng(21);
        for _ in 0..20 {
            let o1 = random::haar_unitary(3, &mut r).map(|z| z.re);
            let t = Matrix3::from_fn(|i, j| o1[(i, j)]) * Matrix3::from_diagonal(&Vector3::new(
                rand::Rng::random_range(&mut r, 0.2..1.0),
                rand::Rng::random_range(&mut r, 0.2..1.0),
                rand::Rng::random_range(&mut r, 0.2..1.0),
            ));
            let q = tstate_critical_radius(&t, DEFAULT_QUAD_POINTS).unwrap();
            let exact = radius_by_reduction(&t);
            assert!((q.radius - exact).abs() < 1e-3, "{} vs {}", q.radius, exact);
            assert!((q.radius - exact).abs() <= 10.0 * q.error_estimate + 1e-9);
        }
        // peaked integrand: quadrature is off, and says so
        let t = Matrix3::from_diagonal(&Vector3::new(0.65, 0.05, 0.006));
        let q = tstate_critical_radius(&t, DEFAULT_QUAD_POINTS).unwrap();
        let exact = radius_by_reduction(&t);
        assert!((q.radius - exact).abs() > 1e-3);
        assert!(q.error_estimate > 1e-3);
    }

    #[test]
    fn tstate_radius_scales_inversely() {
        let t = Matrix3::from_diagonal(&Vector3::new(-0.9, 0.6, -0.4));
        let r = tstate_critical_radius(&t, DEFAULT_QUAD_POINTS).unwrap().radius;
        let r2 = tstate_critical_radius(&(t * 0.5), DEFAULT_QUAD_POINTS).unwrap().radius;
        assert!((r2 - 2.0 * r).abs() < 1e-6);
    }

    #[test]
    fn inradii() {
        assert!((DirectionSet::paulis().inradius() - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        let planar = DirectionSet::new(vec![[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        assert_eq!(planar.inradius(), 0.0);
        // icosahedron with unit circumradius
        let ico = DirectionSet::icosahedral6().inradius();
        let expected = GOLDEN * GOLDEN / (3f64.sqrt() * (1.0 + GOLDEN * GOLDEN).sqrt());
        assert!((ico - expected).abs() < 1e-12);
        let idd = DirectionSet::dodeca_icosa15().inradius();
        assert!(idd > ico);
        assert!(DirectionSet::dodeca_icosa15().len() == 15);
    }

    #[test]
    fn inradius_grows_with_axes() {
        let mut prev = 0.0;
        let base = DirectionSet::fibonacci(12).unwrap();
        for k in 3..=12 {
            let s = DirectionSet::new(base.axes()[..k].to_vec()).unwrap().inradius();
            assert!(s >= prev - 1e-12);
            assert!(s <= 1.0);
            prev = s;
        }
    }

    #[test]
    fn parse_schemes() {
        assert_eq!("icosa6".parse::<DirectionSet>().unwrap().len(), 6);
        assert_eq!("fib:20".parse::<DirectionSet>().unwrap().len(), 20);
        assert!("fib:x".parse::<DirectionSet>().is_err());
        assert!(DirectionSet::new(vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]).is_err());
    }

    #[test]
    fn filter_form_of_one_way_state() {
        let alpha = 0.6;
        let f = canonical_filter_form(&one_way_state(alpha, 0.3).unwrap()).unwrap();
        let target = linalg::outer(&max_entangled(2)) * c(alpha, 0.0)
            + linalg::identity(4) * c((1.0 - alpha) / 4.0, 0.0);
        assert!(linalg::dist(f.state.matrix(), &target) < 1e-12);
        let w = werner(2, 0.7).unwrap();
        let fw = canonical_filter_form(&w).unwrap();
        assert!(linalg::dist(fw.state.matrix(), w.matrix()) < 1e-12);
    }

    #[test]
    fn singlet_bounds() {
        let cfg = SdpConfig::default();
        let rho = singlet();
        let up = radius_upper(&rho, &DirectionSet::paulis(), &cfg).unwrap().value;
        assert!((up - 1.0 / 3f64.sqrt()).abs() < 1e-6);
        let b = radius_bracket(&rho, &DirectionSet::icosahedral6(), &cfg).unwrap();
        assert!(b.upper > 0.5 && b.upper <= 1.0 / 3f64.sqrt() + 1e-7);
        assert!(b.contains(0.5, 0.0));
        let planar = DirectionSet::new(vec![[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let bp = radius_bracket(&rho, &planar, &cfg).unwrap();
        assert!((bp.upper - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
        assert_eq!(bp.lower, 0.0);
        assert!(!bp.warnings.is_empty());
    }

    #[test]
    fn weak_werner_bracket_exceeds_one() {
        let cfg = SdpConfig::default();
        let b = radius_bracket(&werner(2, 0.4).unwrap(), &DirectionSet::icosahedral6(), &cfg).unwrap();
        assert!(b.contains(1.25, 1e-6));
        assert!(b.upper > 1.0);
    }

    /// Local unitaries and a Bell-diagonal core give T-states with `a = b = 0`.
    fn random_tstate(seed: u64) -> DensityMatrix {
        let mut r = random::rng(seed);
        let bells = [
            [1.0, 0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0, -1.0],
            [0.0, 1.0, 1.0, 0.0],
            [0.0, 1.0, -1.0, 0.0],
        ];
        let w: Vec<f64> = (0..4).map(|_| -(rand::Rng::random::<f64>(&mut r)).ln()).collect();
        let total: f64 = w.iter().sum();
        let mut m = CMat::zeros(4, 4);
        for (b, wi) in bells.iter().zip(&w) {
            let v = crate::linalg::CVec::from_iterator(4, b.iter().map(|&x| c(x / 2f64.sqrt(), 0.0)));
            m += linalg::outer(&v) * c(wi / total, 0.0);
        }
        let u = linalg::kron(&random::haar_unitary(2, &mut r), &random::haar_unitary(2, &mut r));
        DensityMatrix::raw(linalg::hermitian_part(&(&u * m * u.adjoint())))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn bracket_contains_tstate_radius(seed in any::<u64>()) {
            let rho = random_tstate(seed);
            let t = correlation_matrix(&rho).unwrap();
            let r = tstate_critical_radius(&t, DEFAULT_QUAD_POINTS).unwrap();
            prop_assume!(!r.singular && r.radius < RADIUS_CAP / 2.0 && r.error_estimate < 1e-4);
            let b = radius_bracket(&rho, &DirectionSet::icosahedral6(), &SdpConfig::default()).unwrap();
            prop_assert!(b.contains(r.radius, 1e-3), "{} not in [{}, {}] sv {} err {}", r.radius, b.lower, b.upper, t.svd(false, false).singular_values, r.error_estimate);
        }

        #[test]
        fn bounds_are_filter_invariant(seed in any::<u64>()) {
            let rho = random::random_state(4, 4, &mut random::rng(seed));
            let cfg = SdpConfig::default();
            let dirs = DirectionSet::icosahedral6();
            let a = radius_bracket(&rho, &dirs, &cfg).unwrap();
            let b = radius_bracket(&canonical_filter_form(&rho).unwrap().state, &dirs, &cfg).unwrap();
            prop_assert!((a.upper - b.upper).abs() < 1e-6);
            prop_assert!((a.lower - b.lower).abs() < 1e-6);
        }

        #[test]
        fn filtered_marginal_is_maximally_mixed(seed in any::<u64>()) {
            let rho = random::random_state(4, 3, &mut random::rng(seed));
            let f = canonical_filter_form(&rho).unwrap();
            let rb = linalg::partial_trace(f.state.matrix(), (2, 2), linalg::Subsystem::A).unwrap();
            prop_assert!(linalg::dist(&rb, &(linalg::identity(2) * c(0.5, 0.0))) < 1e-9);
        }
    }
}
