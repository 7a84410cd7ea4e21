//! Interference Laplace transforms: typical room and typical user, with
//! and without Rayleigh fading, and the joint two-room transform.
//!
//! Every transform is a product over the axes of lattice factors. The
//! factor for axis `a` runs its outer index along axis `a` and sums a
//! penetration kernel over the transverse lattice `Z^{n-1}`; truncation
//! is certified against the geometric tails of the losses before any
//! value is returned (see [`SeriesControl`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{pow_abs, ChannelModel, GridParams, RoomIndex};
use crate::series::{
    box_tail, for_each_abs_class, geom_tail, geom_tail_shifted, geom_total, Kahan, SeriesControl,
};

/// Which stationary perspective the transform is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Perspective {
    /// Palm view at a grid corner: all room sides are exponential.
    TypicalRoom,
    /// Stationary view at a fixed point: the zero cell is size-biased.
    TypicalUser,
}

/// A single transform evaluation request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplaceQuery {
    pub s: f64,
    pub channel: ChannelModel,
    pub perspective: Perspective,
    /// Second room for joint queries.
    pub room: Option<RoomIndex>,
    /// Second argument for joint queries.
    pub s2: Option<f64>,
}

impl LaplaceQuery {
    pub fn room(s: f64, channel: ChannelModel) -> Self {
        LaplaceQuery { s, channel, perspective: Perspective::TypicalRoom, room: None, s2: None }
    }

    pub fn user(s: f64, channel: ChannelModel) -> Self {
        LaplaceQuery { s, channel, perspective: Perspective::TypicalUser, room: None, s2: None }
    }
}

/// Cyclic rotation placing index `a` first; the paper's modulo runs
/// `1..=n`, so factor `a` (0-based) sees the loss vector
/// `(K_a, K_{a+1}, ..., K_{a-1})`.
pub(crate) fn rotate<T: Copy>(v: &[T], a: usize) -> Vec<T> {
    let n = v.len();
    (0..n).map(|i| v[(a + i) % n]).collect()
}

fn check_s(s: f64) -> Result<()> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::InvalidParams(format!("Laplace argument must be finite and >= 0, got {s}")));
    }
    Ok(())
}

fn kernel_weight(channel: ChannelModel, u: f64) -> f64 {
    match channel {
        // 1 - e^{-u}
        ChannelModel::NoFading => -(-u).exp_m1(),
        // 1 - 1/(1+u)
        ChannelModel::Rayleigh => u / (1.0 + u),
    }
}

/// Transverse kernel values `t = prod_q K_q^{a_q}` with multiplicities,
/// zero kernels dropped.
fn transverse_classes(k_rest: &[f64], m: usize) -> Vec<(f64, f64)> {
    let mut classes = Vec::new();
    for_each_abs_class(k_rest.len(), m, |abs, mult| {
        let t: f64 = abs
            .iter()
            .zip(k_rest)
            .map(|(&a, &k)| pow_abs(k, a as i64))
            .product();
        if t > 0.0 {
            classes.push((t, mult));
        }
    });
    classes
}

struct AxisFactor {
    rho: f64,
    k_own: f64,
    k_rest: Vec<f64>,
    classes: Vec<(f64, f64)>,
}

fn axis_factors(params: &GridParams, m: usize) -> Vec<AxisFactor> {
    (0..params.n)
        .map(|a| {
            let ks = rotate(&params.k, a);
            let (k_own, k_rest) = (ks[0], ks[1..].to_vec());
            AxisFactor {
                rho: params.edge_mult() * params.ratio(a),
                k_own,
                classes: transverse_classes(&k_rest, m),
                k_rest,
            }
        })
        .collect()
}

impl AxisFactor {
    /// `sum_transverse w(s * c)` for outer kernel value `c_own`.
    fn inner_sum(&self, channel: ChannelModel, s: f64, c_own: f64) -> f64 {
        if c_own == 0.0 || s == 0.0 {
            return 0.0;
        }
        let mut acc = Kahan::default();
        for &(t, mult) in &self.classes {
            acc.add(mult * kernel_weight(channel, s * c_own * t));
        }
        acc.value()
    }

    /// Log of the room-perspective factor over outer indices `|i| <= m`.
    fn log_room(&self, channel: ChannelModel, s: f64, m: usize) -> f64 {
        let mut acc = Kahan::default();
        for i in -(m as i64)..=m as i64 {
            let c = pow_abs(self.k_own, i);
            acc.add(-(self.rho * self.inner_sum(channel, s, c)).ln_1p());
        }
        acc.value()
    }

    /// Log of the user-perspective factor: outer index `i >= 1` at wall
    /// depth `i - 1`, squared for the two half-axes.
    fn log_user(&self, channel: ChannelModel, s: f64, m: usize) -> f64 {
        let mut acc = Kahan::default();
        for i in 1..=m as i64 {
            let c = pow_abs(self.k_own, i - 1);
            acc.add(-2.0 * (self.rho * self.inner_sum(channel, s, c)).ln_1p());
        }
        acc.value()
    }

    fn tail_room(&self, s: f64, m: usize) -> f64 {
        let rest: f64 = self.k_rest.iter().map(|&k| geom_total(k)).product();
        self.rho
            * s
            * (geom_tail(self.k_own, m) * rest
                + geom_total(self.k_own) * box_tail(&self.k_rest, m))
    }

    fn tail_user(&self, s: f64, m: usize) -> f64 {
        let rest: f64 = self.k_rest.iter().map(|&k| geom_total(k)).product();
        // One-sided outer sum at depth i-1, doubled by the exponent.
        let outer = if self.k_own == 0.0 { 0.0 } else { self.k_own.powi(m as i32) / (1.0 - self.k_own) };
        2.0 * self.rho * s * (outer * rest + box_tail(&self.k_rest, m) / (1.0 - self.k_own))
    }
}

fn evaluate(
    params: &GridParams,
    ctrl: &SeriesControl,
    channel: ChannelModel,
    s: f64,
    perspective: Perspective,
) -> Result<f64> {
    params.validate()?;
    check_s(s)?;
    if s == 0.0 {
        return Ok(1.0);
    }
    for m in ctrl.schedule() {
        let factors = axis_factors(params, m);
        let tail: f64 = factors
            .iter()
            .map(|f| match perspective {
                Perspective::TypicalRoom => f.tail_room(s, m),
                Perspective::TypicalUser => f.tail_user(s, m),
            })
            .sum();
        if tail <= ctrl.tol {
            let log_l: f64 = factors
                .iter()
                .map(|f| match perspective {
                    Perspective::TypicalRoom => f.log_room(channel, s, m),
                    Perspective::TypicalUser => f.log_user(channel, s, m),
                })
                .sum();
            return Ok(log_l.exp());
        }
    }
    Err(ctrl.non_convergence())
}

/// Laplace transform of the interference observed in the typical room.
pub fn laplace_room(q: &LaplaceQuery, params: &GridParams, ctrl: &SeriesControl) -> Result<f64> {
    if q.perspective != Perspective::TypicalRoom {
        return Err(Error::Precondition("laplace_room requires the typical-room perspective".into()));
    }
    evaluate(params, ctrl, q.channel, q.s, Perspective::TypicalRoom)
}

/// Laplace transform of the interference observed by the typical user.
pub fn laplace_user(q: &LaplaceQuery, params: &GridParams, ctrl: &SeriesControl) -> Result<f64> {
    if q.perspective != Perspective::TypicalUser {
        return Err(Error::Precondition("laplace_user requires the typical-user perspective".into()));
    }
    evaluate(params, ctrl, q.channel, q.s, Perspective::TypicalUser)
}

pub(crate) fn laplace_room_rayleigh(s: f64, params: &GridParams, ctrl: &SeriesControl) -> Result<f64> {
    evaluate(params, ctrl, ChannelModel::Rayleigh, s, Perspective::TypicalRoom)
}

pub(crate) fn laplace_user_rayleigh(s: f64, params: &GridParams, ctrl: &SeriesControl) -> Result<f64> {
    evaluate(params, ctrl, ChannelModel::Rayleigh, s, Perspective::TypicalUser)
}

/// Joint Laplace transform of the interference in the typical room and in
/// `room`, under Rayleigh fading (the only case with a closed form).
pub fn joint_laplace_room(
    s1: f64,
    s2: f64,
    params: &GridParams,
    room: &RoomIndex,
    ctrl: &SeriesControl,
) -> Result<f64> {
    params.validate()?;
    check_s(s1)?;
    check_s(s2)?;
    if room.dim() != params.n {
        return Err(Error::Dimension { expected: params.n, got: room.dim() });
    }
    if s1 == 0.0 && s2 == 0.0 {
        return Ok(1.0);
    }
    let max_shift = room.0.iter().map(|l| l.unsigned_abs()).max().unwrap_or(0) as usize;
    for m in ctrl.schedule() {
        if m < 2 * max_shift + 2 {
            continue;
        }
        let mut total_tail = 0.0;
        let mut log_l = Kahan::default();
        for a in 0..params.n {
            let ks = rotate(&params.k, a);
            let ls = rotate(&room.0, a);
            let rho = params.edge_mult() * params.ratio(a);
            let (k_own, k_rest) = (ks[0], &ks[1..]);
            let (l_own, l_rest) = (ls[0], &ls[1..]);

            let rest_total: f64 = k_rest.iter().map(|&k| geom_total(k)).product();
            let mut tail = s1 * (geom_tail(k_own, m) * rest_total + geom_total(k_own) * box_tail(k_rest, m));
            let shifted_rest: f64 = k_rest.iter().map(|&k| geom_total(k)).product();
            let shifted_box: f64 = (0..k_rest.len())
                .map(|q| {
                    let mut t = geom_tail_shifted(k_rest[q], m, l_rest[q]);
                    for (q2, &k2) in k_rest.iter().enumerate() {
                        if q2 != q {
                            t *= geom_total(k2);
                        }
                    }
                    t
                })
                .sum();
            tail += s2
                * (geom_tail_shifted(k_own, m, l_own) * shifted_rest
                    + geom_total(k_own) * shifted_box);
            total_tail += rho * tail;

            for i in -(m as i64)..=m as i64 {
                let c1_own = pow_abs(k_own, i);
                let c2_own = pow_abs(k_own, i - l_own);
                let inner = joint_inner(s1, s2, c1_own, c2_own, k_rest, l_rest, m);
                log_l.add(-(rho * inner).ln_1p());
            }
        }
        if total_tail <= ctrl.tol {
            return Ok(log_l.value().exp());
        }
    }
    Err(ctrl.non_convergence())
}

/// `sum_{a in box} (1 - 1/((1+s1 c1)(1+s2 c2)))` over signed transverse
/// cells; `c2` is shifted by the room offset.
fn joint_inner(
    s1: f64,
    s2: f64,
    c1_own: f64,
    c2_own: f64,
    k_rest: &[f64],
    l_rest: &[i64],
    m: usize,
) -> f64 {
    let d = k_rest.len();
    let mut acc = Kahan::default();
    let mut idx = vec![-(m as i64); d];
    loop {
        let mut t1 = c1_own;
        let mut t2 = c2_own;
        for q in 0..d {
            t1 *= pow_abs(k_rest[q], idx[q]);
            t2 *= pow_abs(k_rest[q], idx[q] - l_rest[q]);
        }
        let u1 = s1 * t1;
        let u2 = s2 * t2;
        if u1 > 0.0 || u2 > 0.0 {
            acc.add(1.0 - 1.0 / ((1.0 + u1) * (1.0 + u2)));
        }
        // Advance the odometer.
        let mut q = 0;
        loop {
            if q == d {
                return acc.value();
            }
            idx[q] += 1;
            if idx[q] <= m as i64 {
                break;
            }
            idx[q] = -(m as i64);
            q += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{mean_room, mean_user};

    fn sym(r: f64, k: f64) -> GridParams {
        GridParams::symmetric(3, 1.0, r, k).unwrap()
    }

    fn ctrl() -> SeriesControl {
        SeriesControl::new(16, 1e-10, 4096).unwrap()
    }

    #[test]
    fn rotation_convention_for_three_axes() {
        let k = [0.1, 0.2, 0.3];
        assert_eq!(rotate(&k, 0), vec![0.1, 0.2, 0.3]);
        assert_eq!(rotate(&k, 1), vec![0.2, 0.3, 0.1]);
        assert_eq!(rotate(&k, 2), vec![0.3, 0.1, 0.2]);
    }

    #[test]
    fn unit_value_at_zero_argument() {
        let p = sym(0.1, 0.3);
        let c = ctrl();
        assert_eq!(laplace_room(&LaplaceQuery::room(0.0, ChannelModel::NoFading), &p, &c).unwrap(), 1.0);
        assert_eq!(laplace_user(&LaplaceQuery::user(0.0, ChannelModel::Rayleigh), &p, &c).unwrap(), 1.0);
        assert_eq!(joint_laplace_room(0.0, 0.0, &p, &RoomIndex::zero(3), &c).unwrap(), 1.0);
    }

    #[test]
    fn perspective_guards() {
        let p = sym(0.1, 0.3);
        let c = ctrl();
        assert!(laplace_room(&LaplaceQuery::user(1.0, ChannelModel::NoFading), &p, &c).is_err());
        assert!(laplace_user(&LaplaceQuery::room(1.0, ChannelModel::NoFading), &p, &c).is_err());
        assert!(laplace_room(&LaplaceQuery::room(-1.0, ChannelModel::NoFading), &p, &c).is_err());
    }

    #[test]
    fn shielded_room_matches_closed_form() {
        // K = 0: only the own room interferes and each axis factor
        // collapses to (1 + 4 r (1 - e^{-s}))^{-1}.
        let p = sym(0.1, 0.0);
        let c = ctrl();
        for s in [0.3, 1.0, 5.0, 60.0] {
            let l = laplace_room(&LaplaceQuery::room(s, ChannelModel::NoFading), &p, &c).unwrap();
            let expect = (1.0 + 0.4 * (1.0 - (-s as f64).exp())).powi(-3);
            assert!((l - expect).abs() < 1e-12, "s={s}: {l} vs {expect}");
        }
        // s -> infinity limit is the empty-room probability.
        let l = laplace_room(&LaplaceQuery::room(1e9, ChannelModel::NoFading), &p, &c).unwrap();
        assert!((l - 1.4f64.powi(-3)).abs() < 1e-9);
    }

    /// Richardson-extrapolated forward difference of `-dL/ds` at 0.
    fn neg_derivative_at_zero(mut l: impl FnMut(f64) -> f64) -> f64 {
        let h = 1e-4;
        let d = |h: f64, l: &mut dyn FnMut(f64) -> f64| (1.0 - l(h)) / h;
        2.0 * d(0.5 * h, &mut l) - d(h, &mut l)
    }

    #[test]
    fn derivative_at_zero_matches_means() {
        let p = sym(0.1, 0.3);
        let c = ctrl();
        let d_room = neg_derivative_at_zero(|s| {
            laplace_room(&LaplaceQuery::room(s, ChannelModel::NoFading), &p, &c).unwrap()
        });
        assert!((d_room - mean_room(&p)).abs() / mean_room(&p) < 1e-3);
        let d_user = neg_derivative_at_zero(|s| {
            laplace_user(&LaplaceQuery::user(s, ChannelModel::NoFading), &p, &c).unwrap()
        });
        assert!((d_user - mean_user(&p)).abs() / mean_user(&p) < 1e-3);
        // Rayleigh fading has unit mean, so the derivative is unchanged.
        let d_ray = neg_derivative_at_zero(|s| {
            laplace_room(&LaplaceQuery::room(s, ChannelModel::Rayleigh), &p, &c).unwrap()
        });
        assert!((d_ray - d_room).abs() / d_room < 1e-6);
    }

    #[test]
    fn joint_marginalizes_to_single_room() {
        let p = sym(0.1, 0.3);
        let c = ctrl();
        for room in [RoomIndex(vec![1, 0, 0]), RoomIndex(vec![2, -1, 1])] {
            let joint = joint_laplace_room(0.7, 0.0, &p, &room, &c).unwrap();
            let single = laplace_room(&LaplaceQuery::room(0.7, ChannelModel::Rayleigh), &p, &c).unwrap();
            assert!((joint - single).abs() <= 2.0 * c.tol + 1e-12, "{joint} vs {single}");
        }
    }

    #[test]
    fn range_monotonicity_and_log_convexity() {
        let p = sym(0.1, 0.316);
        let c = ctrl();
        let grid: Vec<f64> = (0..14).map(|i| 0.25 * f64::from(i)).collect();
        for channel in [ChannelModel::NoFading, ChannelModel::Rayleigh] {
            for perspective in [Perspective::TypicalRoom, Perspective::TypicalUser] {
                let vals: Vec<f64> = grid
                    .iter()
                    .map(|&s| evaluate(&p, &c, channel, s, perspective).unwrap())
                    .collect();
                for w in vals.windows(2) {
                    assert!(w[0] > 0.0 && w[0] <= 1.0);
                    assert!(w[1] <= w[0] + 1e-14);
                }
                let logs: Vec<f64> = vals.iter().map(|v| v.ln()).collect();
                for w in logs.windows(3) {
                    assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-9, "log-convexity violated");
                }
            }
        }
    }

    #[test]
    fn doubling_radius_is_stable() {
        let p = sym(0.1, 0.316);
        for s in [0.1, 1.0, 10.0] {
            let tight = SeriesControl::new(24, 1e-10, 4096).unwrap();
            let wide = SeriesControl::new(48, 1e-10, 4096).unwrap();
            let a = laplace_room(&LaplaceQuery::room(s, ChannelModel::Rayleigh), &p, &tight).unwrap();
            let b = laplace_room(&LaplaceQuery::room(s, ChannelModel::Rayleigh), &p, &wide).unwrap();
            assert!((a - b).abs() < tight.tol);
            let a = laplace_user(&LaplaceQuery::user(s, ChannelModel::NoFading), &p, &tight).unwrap();
            let b = laplace_user(&LaplaceQuery::user(s, ChannelModel::NoFading), &p, &wide).unwrap();
            assert!((a - b).abs() < tight.tol);
        }
    }

    #[test]
    fn reports_non_convergence_at_radius_cap() {
        let p = sym(0.1, 0.97);
        let tiny = SeriesControl::new(2, 1e-12, 4).unwrap();
        match laplace_room(&LaplaceQuery::room(5.0, ChannelModel::Rayleigh), &p, &tiny) {
            Err(Error::NonConvergence { .. }) => {}
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn user_factor_defined_at_zero_loss() {
        // The depth-(i-1) kernel keeps K_1 = 0 legal: only the zero cell
        // interferes.
        let p = sym(0.1, 0.0);
        let c = ctrl();
        let l = laplace_user(&LaplaceQuery::user(2.0, ChannelModel::Rayleigh), &p, &c).unwrap();
        let w = 2.0 / 3.0; // u/(1+u) at u = 2
        let expect = (1.0 + 0.4 * w as f64).powi(-6);
        assert!((l - expect).abs() < 1e-12);
    }
}
