//! `[u]^p = ∫∫ |u(x)−u(y)|^p |x−y|^{−2} dx dy` for continuous
//! piecewise-linear `u`, summed over ordered pairs of cells plus the two
//! unbounded tails.
//!
//! * same cell: closed form `2|m|^p h^p/(p(p−1))`;
//! * neighbouring cells: polar substitution around the shared node reduces
//!   the pair to a 1D integral in the angle variable;
//! * separated cells: tensor Gauss rules on blocks whose size does not
//!   exceed their distance, splitting the wider cell otherwise;
//! * tails: the inner integral over `|y| > support` is `1/dist`.

use rayon::prelude::*;

use crate::constants::Params;
use crate::error::{Error, Result};
use crate::function_models::GridFunction;
use crate::quadrature::{gauss_legendre, integrate, pairwise_sum_estimates, Estimate, Tolerance};

/// A linear segment on `[a, b]` with end values `ua`, `ub`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Seg {
    pub a: f64,
    pub b: f64,
    pub ua: f64,
    pub ub: f64,
}

impl Seg {
    #[inline]
    pub fn h(&self) -> f64 {
        self.b - self.a
    }

    #[inline]
    pub fn slope(&self) -> f64 {
        (self.ub - self.ua) / (self.b - self.a)
    }

    #[inline]
    pub fn at(&self, x: f64) -> f64 {
        self.ua + (x - self.a) * self.slope()
    }

    fn is_zero(&self) -> bool {
        self.ua == 0.0 && self.ub == 0.0
    }

    fn halves(&self) -> (Seg, Seg) {
        let m = 0.5 * (self.a + self.b);
        let um = 0.5 * (self.ua + self.ub);
        (
            Seg {
                a: self.a,
                b: m,
                ua: self.ua,
                ub: um,
            },
            Seg {
                a: m,
                b: self.b,
                ua: um,
                ub: self.ub,
            },
        )
    }
}

/// `|z|^p`, using `powi` for even integer exponents.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Power {
    p: f64,
    even: Option<i32>,
}

impl Power {
    pub fn new(p: f64) -> Self {
        let even = (p.fract() == 0.0 && p <= 64.0 && (p as i32) % 2 == 0).then_some(p as i32);
        Self { p, even }
    }

    #[inline]
    pub fn apply(&self, z: f64) -> f64 {
        match self.even {
            Some(k) => z.powi(k),
            None => z.abs().powf(self.p),
        }
    }

    pub fn is_even(&self) -> bool {
        self.even.is_some()
    }
}

pub(crate) fn segments(u: &GridFunction) -> Vec<Seg> {
    let (x, v) = (u.nodes(), u.values());
    (0..u.n_cells())
        .map(|i| Seg {
            a: x[i],
            b: x[i + 1],
            ua: v[i],
            ub: v[i + 1],
        })
        .collect()
}

/// Same-cell contribution.
pub(crate) fn self_cell(seg: &Seg, pw: Power) -> f64 {
    let p = pw.p;
    2.0 * pw.apply(seg.slope()) * seg.h().powf(p) / (p * (p - 1.0))
}

/// Both orderings of the pair `(left, right)` sharing the node `left.b == right.a`.
///
/// With `x = x_k − ρt`, `y = x_k + ρ(1−t)` the radial integral is
/// elementary and leaves `∫_0^1 |m_L t + m_R(1−t)|^p R(t)^p/p dt`,
/// `R(t) = min(h_L/t, h_R/(1−t))`.
pub(crate) fn adjacent_pair(left: &Seg, right: &Seg, pw: Power) -> Result<Estimate> {
    let (ml, mr) = (left.slope(), right.slope());
    if ml == 0.0 && mr == 0.0 {
        return Ok(Estimate::exact(0.0));
    }
    let (hl, hr) = (left.h(), right.h());
    let p = pw.p;
    let t_star = hl / (hl + hr);
    let mut breaks = vec![0.0, t_star, 1.0];
    if !pw.is_even() && ml != mr {
        let t0 = mr / (mr - ml);
        if t0 > 0.0 && t0 < 1.0 && t0 != t_star {
            breaks.push(t0);
            breaks.sort_by(f64::total_cmp);
        }
    }
    let scale = pw.apply(ml.abs().max(mr.abs())) * hl.max(hr).powf(p);
    let f = |t: f64| {
        let r = if t <= t_star { hr / (1.0 - t) } else { hl / t };
        pw.apply(ml * t + mr * (1.0 - t)) * r.powf(p) / p
    };
    let tol = Tolerance {
        abs: 1e-16 * scale + f64::MIN_POSITIVE,
        rel: 1e-13,
        max_panels: 400,
    };
    Ok(integrate(f, &breaks, tol, "adjacent cell pair")?.scale(2.0))
}

fn gauss_order(ratio: f64) -> usize {
    if ratio < 4.0 {
        10
    } else if ratio < 16.0 {
        7
    } else {
        5
    }
}

fn tensor_block(x: &Seg, y: &Seg, pw: Power, n: usize) -> f64 {
    let rule = gauss_legendre(n);
    let my = y.slope();
    rule.integrate(x.a, x.b, |xv| {
        let ux = x.at(xv);
        let inner = |yv: f64| {
            let d = yv - xv;
            pw.apply(ux - y.at(yv)) / (d * d)
        };
        if !pw.is_even() && my != 0.0 {
            let y0 = y.a + (ux - y.ua) / my;
            if y0 > y.a && y0 < y.b {
                return rule.integrate(y.a, y0, inner) + rule.integrate(y0, y.b, inner);
            }
        }
        rule.integrate(y.a, y.b, inner)
    })
}

/// Both orderings of a pair of cells with `x.b < y.a`.
pub(crate) fn separated_pair(x: &Seg, y: &Seg, pw: Power) -> Estimate {
    if x.is_zero() && y.is_zero() {
        return Estimate::exact(0.0);
    }
    if x.ua == x.ub && y.ua == y.ub && x.ua == y.ua {
        return Estimate::exact(0.0);
    }
    let gap = y.a - x.b;
    let (wx, wy) = (x.h(), y.h());
    if wx.max(wy) > gap {
        return if wx >= wy {
            let (l, r) = x.halves();
            separated_pair(&l, y, pw) + separated_pair(&r, y, pw)
        } else {
            let (l, r) = y.halves();
            separated_pair(x, &l, pw) + separated_pair(x, &r, pw)
        };
    }
    let n = gauss_order(gap / wx.max(wy));
    let hi = tensor_block(x, y, pw, n);
    let lo = tensor_block(x, y, pw, n - 2);
    Estimate::new(
        2.0 * hi,
        2.0 * (hi - lo).abs() + 4.0 * f64::EPSILON * hi.abs(),
    )
}

/// Interaction of one cell with both exterior half-lines
/// `(−∞, left_end]` and `[right_end, ∞)`, counted in both orders.
pub(crate) fn tail_cell(seg: &Seg, left_end: f64, right_end: f64, pw: Power) -> Result<Estimate> {
    if seg.is_zero() {
        return Ok(Estimate::exact(0.0));
    }
    let p = pw.p;
    let mut closed = 0.0;
    let touches_left = seg.a == left_end;
    let touches_right = seg.b == right_end;
    // A cell touching an end vanishes there, so |u|^p/dist is |m|^p dist^{p−1}.
    let edge = pw.apply(seg.slope()) * seg.h().powf(p) / p;
    if touches_left {
        closed += edge;
    }
    if touches_right {
        closed += edge;
    }
    if touches_left && touches_right {
        return Ok(Estimate::new(2.0 * closed, 8.0 * f64::EPSILON * closed));
    }
    let f = |x: f64| {
        let w = if touches_left {
            1.0 / (right_end - x)
        } else if touches_right {
            1.0 / (x - left_end)
        } else {
            1.0 / (right_end - x) + 1.0 / (x - left_end)
        };
        pw.apply(seg.at(x)) * w
    };
    let mut breaks = vec![seg.a, seg.b];
    if seg.ua * seg.ub < 0.0 {
        breaks.insert(1, seg.a - seg.ua / seg.slope());
    }
    let scale = pw.apply(seg.ua.abs().max(seg.ub.abs()));
    let tol = Tolerance {
        abs: 1e-16 * scale + f64::MIN_POSITIVE,
        rel: 1e-13,
        max_panels: 400,
    };
    let est = integrate(f, &breaks, tol, "tail interaction")?;
    Ok((est + Estimate::new(closed, 8.0 * f64::EPSILON * closed)).scale(2.0))
}

fn row_contribution(
    segs: &[Seg],
    i: usize,
    pw: Power,
    left_end: f64,
    right_end: f64,
) -> Result<Estimate> {
    let s = &segs[i];
    let mut parts = Vec::with_capacity(segs.len() - i + 2);
    let own = self_cell(s, pw);
    parts.push(Estimate::new(own, 8.0 * f64::EPSILON * own));
    parts.push(tail_cell(s, left_end, right_end, pw)?);
    if i + 1 < segs.len() {
        parts.push(adjacent_pair(s, &segs[i + 1], pw)?);
    }
    for t in segs.iter().skip(i + 2) {
        parts.push(separated_pair(s, t, pw));
    }
    Ok(pairwise_sum_estimates(&parts))
}

/// Gagliardo seminorm `[u]^p` of a conforming piecewise-linear function.
pub fn gagliardo_p_pl(u: &GridFunction, params: Params) -> Result<Estimate> {
    if !u.is_conforming() {
        return Err(Error::input(
            "grid function must vanish at both end nodes (its zero extension would jump)",
        ));
    }
    let pw = Power::new(params.p());
    let segs = segments(u);
    let (left_end, right_end) = (u.nodes()[0], u.nodes()[u.len() - 1]);
    let rows: Vec<Estimate> = (0..segs.len())
        .into_par_iter()
        .map(|i| row_contribution(&segs, i, pw, left_end, right_end))
        .collect::<Result<_>>()?;
    Ok(pairwise_sum_estimates(&rows))
}

/// `[u]^2` as an explicit quadratic form `uᵀ A u` over all nodes of a fixed
/// grid (end values included; they must be zero when evaluated). Only for
/// `s = 1/2`.
#[derive(Debug, Clone)]
pub struct QuadraticSeminorm {
    nodes: Vec<f64>,
    matrix: Vec<f64>,
}

impl QuadraticSeminorm {
    pub fn assemble(nodes: &[f64], params: Params) -> Result<Self> {
        if params.p() != 2.0 {
            return Err(Error::input("the quadratic form exists only for p = 2"));
        }
        let probe = GridFunction::new(nodes.to_vec(), vec![0.0; nodes.len()])?;
        let n = probe.len();
        let pw = Power::new(2.0);
        let (left_end, right_end) = (nodes[0], nodes[n - 1]);
        let geom: Vec<(f64, f64)> = nodes.windows(2).map(|w| (w[0], w[1])).collect();
        let seg = |c: usize, ua: f64, ub: f64| Seg {
            a: geom[c].0,
            b: geom[c].1,
            ua,
            ub,
        };
        // Each block is a quadratic form in a few local node values; recover
        // its coefficients by polarisation.
        type Local = Vec<(usize, usize, f64)>;
        let polarise = |idx: &[usize], q: &dyn Fn(&[f64]) -> Result<f64>| -> Result<Local> {
            let k = idx.len();
            let mut diag = vec![0.0; k];
            let mut e = vec![0.0; k];
            for i in 0..k {
                e.fill(0.0);
                e[i] = 1.0;
                diag[i] = q(&e)?;
            }
            let mut out = Vec::with_capacity(k * k);
            for i in 0..k {
                out.push((idx[i], idx[i], diag[i]));
                for j in i + 1..k {
                    e.fill(0.0);
                    e[i] = 1.0;
                    e[j] = 1.0;
                    let off = 0.5 * (q(&e)? - diag[i] - diag[j]);
                    out.push((idx[i], idx[j], off));
                    out.push((idx[j], idx[i], off));
                }
            }
            Ok(out)
        };
        let n_cells = n - 1;
        let rows: Vec<Local> = (0..n_cells)
            .into_par_iter()
            .map(|c| -> Result<Local> {
                let mut acc = polarise(&[c, c + 1], &|v| {
                    let s = seg(c, v[0], v[1]);
                    Ok(self_cell(&s, pw) + tail_cell(&s, left_end, right_end, pw)?.value)
                })?;
                if c + 1 < n_cells {
                    acc.extend(polarise(&[c, c + 1, c + 2], &|v| {
                        Ok(adjacent_pair(&seg(c, v[0], v[1]), &seg(c + 1, v[1], v[2]), pw)?.value)
                    })?);
                }
                for d in c + 2..n_cells {
                    acc.extend(polarise(&[c, c + 1, d, d + 1], &|v| {
                        Ok(separated_pair(&seg(c, v[0], v[1]), &seg(d, v[2], v[3]), pw).value)
                    })?);
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        let mut matrix = vec![0.0; n * n];
        for local in rows {
            for (i, j, v) in local {
                matrix[i * n + j] += v;
            }
        }
        Ok(Self {
            nodes: nodes.to_vec(),
            matrix,
        })
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Row-major `n × n` matrix.
    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let n = self.dim();
        self.matrix
            .chunks_exact(n)
            .map(|row| row.iter().zip(u).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn eval(&self, u: &[f64]) -> f64 {
        self.apply(u).iter().zip(u).map(|(a, b)| a * b).sum()
    }
}
