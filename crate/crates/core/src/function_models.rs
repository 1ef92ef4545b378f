//! Test functions: the Moser family `u_ε` and piecewise-linear functions on
//! a node grid.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::Params;
use crate::error::{Error, Result};
use crate::quadrature::{
    geometric_breakpoints, integrate, pairwise_sum, Estimate, QuadratureSpec, Tolerance,
};
use crate::report::fmt17;

/// Common interface for functions that the seminorm and functional routines
/// accept.
pub trait FunctionModel: Sync {
    fn eval(&self, x: f64) -> f64;

    /// Closed interval outside which the function vanishes.
    fn support(&self) -> (f64, f64);

    /// Sorted points covering the support at which the function may fail to
    /// be smooth.
    fn breakpoints(&self) -> Vec<f64>;

    /// `u(x) − u(x − d)`. Implementations override this to stay accurate
    /// when `d` is small.
    fn backward_difference(&self, x: f64, d: f64) -> f64 {
        self.eval(x) - self.eval(x - d)
    }

    /// `∫ |u|^q dx`.
    fn lp_norm_p(&self, q: f64, spec: &QuadratureSpec) -> Result<Estimate>;

    /// `[u]^p` for the critical pair.
    fn seminorm_p(&self, params: Params, spec: &QuadratureSpec) -> Result<Estimate>;
}

/// `∫ |u|^q dx`.
pub fn lp_norm_p<F: FunctionModel + ?Sized>(
    u: &F,
    q: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::input(format!(
            "Lebesgue exponent must be positive, got {q}"
        )));
    }
    u.lp_norm_p(q, spec)
}

/// `‖u‖_p^p + [u]^p`.
pub fn full_norm_p<F: FunctionModel + ?Sized>(
    u: &F,
    params: Params,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    Ok(u.lp_norm_p(params.p(), spec)? + u.seminorm_p(params, spec)?)
}

/// `u_ε(x) = |log ε|^{1−s}` on `|x| ≤ ε`, `|log|x||/|log ε|^s` on
/// `ε < |x| < 1`, and zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoserFunction {
    eps: f64,
    params: Params,
}

impl MoserFunction {
    pub fn new(eps: f64, params: Params) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::input(format!("ε must lie in (0, 1), got {eps}")));
        }
        Ok(Self { eps, params })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn params(&self) -> Params {
        self.params
    }

    /// `|log ε|`.
    pub fn log_scale(&self) -> f64 {
        -self.eps.ln()
    }

    /// Value on the plateau `|x| ≤ ε`.
    pub fn peak(&self) -> f64 {
        self.log_scale().powf(1.0 - self.params.s())
    }

    /// Symmetric node set `±x_k` with `x_k` log-spaced between `ε` and 1,
    /// `per_decade` nodes per factor of ten.
    pub fn grid_nodes(&self, per_decade: usize) -> Vec<f64> {
        let l = self.log_scale();
        let n = ((per_decade.max(1) as f64) * l / std::f64::consts::LN_10)
            .ceil()
            .max(1.0) as usize;
        let positive: Vec<f64> = (0..=n)
            .map(|k| match k {
                0 => self.eps,
                k if k == n => 1.0,
                k => (-l * (1.0 - k as f64 / n as f64)).exp(),
            })
            .collect();
        let mut nodes: Vec<f64> = positive.iter().rev().map(|x| -x).collect();
        nodes.extend_from_slice(&positive);
        nodes
    }

    /// Piecewise-linear interpolant on [`grid_nodes`](Self::grid_nodes).
    pub fn to_grid(&self, per_decade: usize) -> GridFunction {
        let nodes = self.grid_nodes(per_decade);
        let values = nodes.iter().map(|&x| self.eval(x)).collect();
        GridFunction { nodes, values }
    }

    fn half_breakpoints(&self) -> Vec<f64> {
        geometric_breakpoints(self.eps, 1.0, 2.0)
    }
}

/// Free-function form of [`MoserFunction::eval`].
pub fn moser_eval(u: &MoserFunction, x: f64) -> f64 {
    u.eval(x)
}

impl FunctionModel for MoserFunction {
    fn eval(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax <= self.eps {
            self.peak()
        } else if ax < 1.0 {
            -ax.ln() / self.log_scale().powf(self.params.s())
        } else {
            0.0
        }
    }

    fn support(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }

    /// `log(a(x−d)/a(x))/|log ε|^s` with `a = min(max(|·|, ε), 1)`.
    fn backward_difference(&self, x: f64, d: f64) -> f64 {
        let clamp = |t: f64| t.abs().clamp(self.eps, 1.0);
        let y = x - d;
        let (ax, ay) = (clamp(x), clamp(y));
        let ratio = if ax == x.abs() && ay == y.abs() && x * y > 0.0 {
            (-d / x).ln_1p()
        } else if ax == ay {
            return 0.0;
        } else {
            ((ay - ax) / ax).ln_1p()
        };
        ratio / self.log_scale().powf(self.params.s())
    }

    fn breakpoints(&self) -> Vec<f64> {
        let half = self.half_breakpoints();
        let mut out: Vec<f64> = half.iter().rev().map(|x| -x).collect();
        out.extend_from_slice(&half);
        out
    }

    /// `2ε|log ε|^{(1−s)q} + 2|log ε|^{−sq} ∫_0^{|log ε|} r^q e^{−r} dr`.
    fn lp_norm_p(&self, q: f64, spec: &QuadratureSpec) -> Result<Estimate> {
        let l = self.log_scale();
        let s = self.params.s();
        let plateau = 2.0 * self.eps * l.powf((1.0 - s) * q);
        let mut breaks = vec![0.0];
        let mut r = 1.0;
        while r < l {
            breaks.push(r);
            r *= 2.0;
        }
        breaks.push(l);
        let slope = integrate(
            |r: f64| r.powf(q) * (-r).exp(),
            &breaks,
            Tolerance::from(spec),
            "Moser Lq norm",
        )?;
        let factor = 2.0 * l.powf(-s * q);
        Ok(Estimate::new(plateau, 4.0 * f64::EPSILON * plateau) + slope.scale(factor))
    }

    fn seminorm_p(&self, params: Params, spec: &QuadratureSpec) -> Result<Estimate> {
        if params != self.params {
            return Err(Error::input("Moser function built for a different s"));
        }
        let report = crate::seminorm::moser_decomposition(self.eps, params, spec)?;
        Ok(Estimate::new(report.total, report.abs_err))
    }
}

/// A continuous piecewise-linear function given by values at strictly
/// increasing nodes, extended by zero outside `[x_0, x_n]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::input(format!(
                "{} nodes but {} values",
                nodes.len(),
                values.len()
            )));
        }
        if nodes.len() < 2 {
            return Err(Error::input("a grid function needs at least two nodes"));
        }
        if let Some(bad) = nodes.iter().chain(&values).find(|v| !v.is_finite()) {
            return Err(Error::input(format!("non-finite entry {bad}")));
        }
        if let Some(i) = nodes.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::input(format!(
                "nodes must be strictly increasing (x[{i}] = {}, x[{}] = {})",
                nodes[i],
                i + 1,
                nodes[i + 1]
            )));
        }
        Ok(Self { nodes, values })
    }

    /// `n_cells` equal cells on `[a, b]` with values `f(x_i)`.
    pub fn uniform<F: Fn(f64) -> f64>(a: f64, b: f64, n_cells: usize, f: F) -> Result<Self> {
        if !(b > a) || n_cells == 0 {
            return Err(Error::input(format!(
                "need a < b and at least one cell, got [{a}, {b}] / {n_cells}"
            )));
        }
        let h = (b - a) / n_cells as f64;
        let nodes: Vec<f64> = (0..=n_cells)
            .map(|i| if i == n_cells { b } else { a + i as f64 * h })
            .collect();
        let values = nodes.iter().map(|&x| f(x)).collect();
        Self::new(nodes, values)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn n_cells(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Both end values vanish, so the zero extension is continuous.
    pub fn is_conforming(&self) -> bool {
        self.values[0] == 0.0 && self.values[self.values.len() - 1] == 0.0
    }

    /// Common spacing if the nodes are equispaced to relative accuracy `rel`.
    pub fn uniform_spacing(&self, rel: f64) -> Option<f64> {
        let n = self.n_cells() as f64;
        let h = (self.nodes[self.nodes.len() - 1] - self.nodes[0]) / n;
        let ok = self
            .nodes
            .iter()
            .enumerate()
            .all(|(i, &x)| (x - (self.nodes[0] + i as f64 * h)).abs() <= rel * h);
        ok.then_some(h)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            nodes: self.nodes.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.nodes.clone(), values)
    }

    /// Exact `∫|u|^q` for the piecewise-linear interpolant.
    pub fn lp_norm_p_exact(&self, q: f64) -> f64 {
        let parts: Vec<f64> = (0..self.n_cells())
            .map(|i| {
                segment_power_integral(
                    self.values[i],
                    self.values[i + 1],
                    self.nodes[i + 1] - self.nodes[i],
                    q,
                )
            })
            .collect();
        pairwise_sum(&parts)
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "u" {
            return Err(Error::input(format!(
                "expected header `x,u`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut nodes = Vec::new();
        let mut values = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parse = |j: usize| -> Result<f64> {
                rec.get(j)
                    .ok_or_else(|| Error::input(format!("row {}: missing column", line + 1)))?
                    .parse::<f64>()
                    .map_err(|e| Error::input(format!("row {}: {e}", line + 1)))
            };
            nodes.push(parse(0)?);
            values.push(parse(1)?);
        }
        Self::new(nodes, values)
    }

    pub fn read_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    /// CSV with header `x,u` and 17 significant digits per value.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        wtr.write_record(["x", "u"])?;
        for (x, u) in self.nodes.iter().zip(&self.values) {
            wtr.write_record([fmt17(*x), fmt17(*u)])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn write_csv_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

impl FunctionModel for GridFunction {
    fn eval(&self, x: f64) -> f64 {
        let n = self.nodes.len();
        if !(x >= self.nodes[0] && x <= self.nodes[n - 1]) {
            return 0.0;
        }
        let j = self.nodes.partition_point(|&t| t <= x);
        if j == 0 {
            return self.values[0];
        }
        if j >= n {
            return self.values[n - 1];
        }
        let (x0, x1) = (self.nodes[j - 1], self.nodes[j]);
        if x == x0 {
            return self.values[j - 1];
        }
        (self.values[j - 1] * (x1 - x) + self.values[j] * (x - x0)) / (x1 - x0)
    }

    fn backward_difference(&self, x: f64, d: f64) -> f64 {
        let n = self.nodes.len();
        let y = x - d;
        let inside = |t: f64| t >= self.nodes[0] && t <= self.nodes[n - 1];
        if !(inside(x) && inside(y)) {
            return self.eval(x) - self.eval(y);
        }
        let segment = |t: f64| self.nodes.partition_point(|&z| z <= t).clamp(1, n - 1) - 1;
        let slope =
            |j: usize| (self.values[j + 1] - self.values[j]) / (self.nodes[j + 1] - self.nodes[j]);
        let (i, j) = (segment(x), segment(y));
        if i == j {
            slope(i) * d
        } else if j + 1 == i {
            let z = self.nodes[i];
            slope(i) * (x - z) + slope(j) * (d - (x - z))
        } else {
            self.eval(x) - self.eval(y)
        }
    }

    fn support(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.nodes.clone()
    }

    fn lp_norm_p(&self, q: f64, _spec: &QuadratureSpec) -> Result<Estimate> {
        let v = self.lp_norm_p_exact(q);
        Ok(Estimate::new(v, 8.0 * f64::EPSILON * v))
    }

    fn seminorm_p(&self, params: Params, _spec: &QuadratureSpec) -> Result<Estimate> {
        crate::seminorm::gagliardo_p_pl(self, params)
    }
}

/// Sample `f` at `nodes` into a piecewise-linear [`GridFunction`].
pub fn sample_to_grid<F: Fn(f64) -> f64>(f: F, nodes: Vec<f64>) -> Result<GridFunction> {
    let values = nodes.iter().map(|&x| f(x)).collect();
    GridFunction::new(nodes, values)
}

/// `∫_0^h |a + (b−a)t/h|^q dt`.
pub(crate) fn segment_power_integral(a: f64, b: f64, h: f64, q: f64) -> f64 {
    if a * b < 0.0 {
        let (aa, ab) = (a.abs(), b.abs());
        let ha = h * aa / (aa + ab);
        return (ha * aa.powf(q) + (h - ha) * ab.powf(q)) / (q + 1.0);
    }
    let (lo, hi) = {
        let (x, y) = (a.abs(), b.abs());
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    };
    if hi == 0.0 {
        return 0.0;
    }
    if hi - lo <= 1e-3 * hi {
        // Mean of t^q over [m−d, m+d] as an even series in d/m.
        let m = 0.5 * (hi + lo);
        let r = (0.5 * (hi - lo) / m).powi(2);
        let c2 = q * (q - 1.0) / 6.0;
        let c4 = c2 * (q - 2.0) * (q - 3.0) / 20.0;
        let c6 = c4 * (q - 4.0) * (q - 5.0) / 42.0;
        h * m.powf(q) * (1.0 + r * (c2 + r * (c4 + r * c6)))
    } else {
        h * (hi.powf(q + 1.0) - lo.powf(q + 1.0)) / ((q + 1.0) * (hi - lo))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Params {
        Params::new(0.5).unwrap()
    }

    #[test]
    fn moser_plateau_and_boundary() {
        let u = MoserFunction::new(1e-4, half()).unwrap();
        let l = 1e-4f64.ln().abs();
        assert!((u.eval(0.0) - l.sqrt()).abs() < 1e-14);
        assert!((u.eval(1e-4) - l.sqrt()).abs() < 1e-14);
        assert!((u.eval(-1e-4 * 1.000001) - l.sqrt()).abs() < 1e-5);
        assert_eq!(u.eval(1.0), 0.0);
        assert_eq!(u.eval(-3.0), 0.0);
        assert_eq!(u.eval(0.3), u.eval(-0.3));
    }

    #[test]
    fn moser_branch_examples() {
        let u = MoserFunction::new((-1.0f64).exp(), half()).unwrap();
        assert!((u.eval(0.0) - 1.0).abs() < 1e-15);
        assert!((u.eval((-0.5f64).exp()) - 0.5).abs() < 1e-15);
        let v = MoserFunction::new(0.1, half()).unwrap();
        assert_eq!(v.eval(2.0), 0.0);
        let g = sample_to_grid(|x| v.eval(x), vec![-1.0, -0.1, 0.1, 1.0]).unwrap();
        assert_eq!(g.values(), &[0.0, v.peak(), v.peak(), 0.0]);
    }

    #[test]
    fn moser_rejects_bad_eps() {
        for eps in [0.0, 1.0, 1.7, -1e-3, f64::NAN] {
            assert!(MoserFunction::new(eps, half()).is_err());
        }
    }

    #[test]
    fn moser_grid_is_symmetric_and_conforming() {
        let u = MoserFunction::new(1e-3, half()).unwrap();
        let g = u.to_grid(16);
        assert!(g.is_conforming());
        let n = g.len();
        for i in 0..n {
            assert_eq!(g.nodes()[i], -g.nodes()[n - 1 - i]);
            assert_eq!(g.values()[i], g.values()[n - 1 - i]);
        }
        assert_eq!(g.nodes()[n / 2], 1e-3);
        assert_eq!(g.values()[n / 2], u.peak());
    }

    #[test]
    fn segment_integral_matches_quadrature() {
        let cases = [
            (0.3, 1.7, 0.4, 2.0),
            (1.0, 1.0000001, 0.2, 3.5),
            (-0.5, 1.5, 1.0, 1.3),
            (0.0, 2.0, 0.5, 2.7),
        ];
        for (a, b, h, q) in cases {
            let exact = segment_power_integral(a, b, h, q);
            let est = integrate(
                |t: f64| (a + (b - a) * t / h).abs().powf(q),
                &[0.0, h * a.abs() / (a.abs() + b.abs()).max(1e-300), h],
                Tolerance {
                    abs: 1e-15,
                    rel: 1e-14,
                    max_panels: 400,
                },
                "t",
            )
            .unwrap();
            assert!(
                (exact - est.value).abs() <= 1e-13 * exact.abs().max(1.0),
                "{a} {b} {h} {q}: {exact} vs {est:?}"
            );
        }
    }

    #[test]
    fn grid_eval_interpolates() {
        let g = GridFunction::new(vec![-1.0, 0.0, 2.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(g.eval(-0.5), 1.0);
        assert_eq!(g.eval(1.0), 1.0);
        assert_eq!(g.eval(2.0), 0.0);
        assert_eq!(g.eval(5.0), 0.0);
        assert_eq!(g.eval(0.0), 2.0);
    }

    #[test]
    fn backward_differences_match_plain_differences() {
        let g = GridFunction::new(vec![-1.0, 0.0, 2.0], vec![0.0, 2.0, 0.0]).unwrap();
        let m = MoserFunction::new(1e-3, half()).unwrap();
        for (x, d) in [
            (0.5, 0.25),
            (0.5, 1.0),
            (1.5, 2.0),
            (-0.5, -2.0),
            (0.2, 0.1),
            (0.01, 0.0095),
            (0.5, 1.0),
        ] {
            assert!(
                (g.backward_difference(x, d) - (g.eval(x) - g.eval(x - d))).abs() < 1e-14,
                "grid {x} {d}"
            );
            assert!(
                (m.backward_difference(x, d) - (m.eval(x) - m.eval(x - d))).abs() < 1e-13,
                "moser {x} {d}"
            );
        }
    }

    #[test]
    fn backward_differences_keep_relative_accuracy() {
        let g = GridFunction::new(vec![-1.0, 0.0, 2.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(g.backward_difference(1.0, 1e-300), -1e-300);
        let m = MoserFunction::new(1e-3, half()).unwrap();
        let d = 1e-20;
        let want = (d / 0.5f64).ln_1p() / m.log_scale().sqrt();
        assert!(want > 0.0);
        assert!((m.backward_difference(0.5, -d) - want).abs() < 1e-12 * want);
        assert_eq!(m.backward_difference(1e-4, 1e-5), 0.0);
    }

    #[test]
    fn grid_validation() {
        assert!(GridFunction::new(vec![0.0, 0.0], vec![0.0, 0.0]).is_err());
        assert!(GridFunction::new(vec![0.0], vec![0.0]).is_err());
        assert!(GridFunction::new(vec![0.0, 1.0], vec![0.0]).is_err());
        assert!(GridFunction::new(vec![0.0, f64::NAN], vec![0.0, 0.0]).is_err());
        let g = GridFunction::new(vec![0.0, 1.0], vec![1.0, 0.0]).unwrap();
        assert!(!g.is_conforming());
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let g = GridFunction::uniform(-1.0, 1.0, 37, |x| (1.0 - x * x).sqrt() / 3.0).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x,u\n"));
        let back = GridFunction::read_csv(buf.as_slice()).unwrap();
        for (a, b) in g.values().iter().zip(back.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(g.nodes(), back.nodes());
    }

    #[test]
    fn csv_rejects_wrong_header() {
        let err = GridFunction::read_csv("a,b\n0,0\n1,0\n".as_bytes()).unwrap_err();
        assert_eq!(err.kind(), "input");
    }

    #[test]
    fn moser_lp_norm_matches_direct_quadrature() {
        let spec = QuadratureSpec::default();
        let u = MoserFunction::new(1e-3, half()).unwrap();
        let closed = u.lp_norm_p(2.0, &spec).unwrap().value;
        let direct = integrate(
            |x: f64| u.eval(x).powi(2),
            &u.breakpoints(),
            Tolerance::from(&spec),
            "t",
        )
        .unwrap();
        assert!((closed - direct.value).abs() < 1e-9 * closed);
    }
}
