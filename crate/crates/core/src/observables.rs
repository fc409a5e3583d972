//! Mode populations, per-channel emission rates and the decoupling figure of merit.

use rayon::prelude::*;

use crate::error::{argument, domain, Error, Result};
use crate::fock::{
    annihilation, expectation, Operator, QuantumState, Truncation, C64, DEFAULT_TAIL,
};
use crate::model::{
    build_local, build_local_in, make_frame, recommended_space, Channel, CommonModeFrame,
    OpenSystemModel, Representation, SystemParams,
};
use crate::solvers::{quadrature_steady_state, steady_state, QuadratureState};

/// Populations below `-NEGATIVE_TOLERANCE` are treated as corrupt data.
pub const NEGATIVE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct EmissionReport {
    /// `⟨R_x†R_x⟩` for every reset operator of the model.
    pub channels: Vec<(Channel, f64)>,
    pub total: f64,
    pub n_a: Option<f64>,
    pub n_b: Option<f64>,
    pub n_1: Option<f64>,
    pub n_2: Option<f64>,
}

impl EmissionReport {
    /// Rate into `channel`; zero for channels the model does not have.
    pub fn rate(&self, channel: Channel) -> f64 {
        self.channels
            .iter()
            .find(|(c, _)| *c == channel)
            .map_or(0.0, |(_, r)| *r)
    }

    pub fn i_1(&self) -> f64 {
        self.rate(Channel::Cavity1)
    }

    pub fn i_2(&self) -> f64 {
        self.rate(Channel::Cavity2)
    }

    pub fn i_m(&self) -> f64 {
        self.rate(Channel::Fiber)
    }
}

fn mode_number(ops: [&Operator; 2], row: [C64; 2]) -> Result<Operator> {
    let c = Operator::linear_combination(ops[0].space(), &[(row[0], ops[0]), (row[1], ops[1])])?;
    c.adjoint().compose(&c)
}

fn real_expectation(op: &Operator, state: &QuantumState) -> Result<f64> {
    Ok(expectation(op, state)?.re)
}

/// Emission rates and populations of `state` under `model`.
///
/// Two-mode models report both local and common-mode populations, using `frame`
/// (or one derived from the model's parameters) for the transform. The
/// effective model reports `n_b` from the adiabatically slaved `c_b`.
pub fn emission_report(
    state: &QuantumState,
    model: &OpenSystemModel,
    frame: Option<&CommonModeFrame>,
) -> Result<EmissionReport> {
    if state.space() != &model.space {
        return Err(argument("state and model live on different Fock spaces"));
    }
    let owned;
    let frame = match (frame, &model.params) {
        (Some(f), Some(p)) => {
            if &f.params != p {
                return Err(argument(
                    "frame was built from different parameters than the model",
                ));
            }
            Some(f)
        }
        (Some(_), None) => {
            return Err(argument("a lone-cavity model has no common-mode frame"));
        }
        (None, Some(p)) => {
            owned = make_frame(p)?;
            Some(&owned)
        }
        (None, None) => None,
    };

    let mut channels = Vec::with_capacity(model.jumps.len());
    for j in &model.jumps {
        let rate = real_expectation(&j.op.adjoint().compose(&j.op)?, state)?;
        channels.push((j.channel, rate));
    }
    let total = channels.iter().map(|(_, r)| r).sum();

    let space = &model.space;
    let (n_a, n_b, n_1, n_2) = match model.representation {
        Representation::Single => {
            let c = annihilation(space, 0)?;
            (
                Some(real_expectation(&c.adjoint().compose(&c)?, state)?),
                None,
                None,
                None,
            )
        }
        Representation::Effective => {
            let f = frame.expect("effective models carry parameters");
            let c = annihilation(space, 0)?;
            let n_a = real_expectation(&c.adjoint().compose(&c)?, state)?;
            let alpha = expectation(&c, state)?;
            let g = f.mixing();
            let ob = f.omega_b;
            let km = f.params.kappa_m;
            let n_b = (ob.norm_sqr() + 2.0 * (ob * g * alpha).im + g.norm_sqr() * n_a) / (km * km);
            (Some(n_a), Some(n_b), None, None)
        }
        Representation::Local | Representation::Common => {
            let f = frame.expect("two-mode models carry parameters");
            let c0 = annihilation(space, 0)?;
            let c1 = annihilation(space, 1)?;
            let n0 = real_expectation(&c0.adjoint().compose(&c0)?, state)?;
            let n1 = real_expectation(&c1.adjoint().compose(&c1)?, state)?;
            let local = model.representation == Representation::Local;
            let rows = if local {
                f.local_to_common()
            } else {
                f.common_to_local()
            };
            let m0 = real_expectation(&mode_number([&c0, &c1], rows[0])?, state)?;
            let m1 = real_expectation(&mode_number([&c0, &c1], rows[1])?, state)?;
            if local {
                (Some(m0), Some(m1), Some(n0), Some(n1))
            } else {
                (Some(n0), Some(n1), Some(m0), Some(m1))
            }
        }
    };
    Ok(EmissionReport {
        channels,
        total,
        n_a,
        n_b,
        n_1,
        n_2,
    })
}

/// `(I₁, I₂, I_m)` from common-mode moments:
/// `I₁ = κ₁(|ξ₂|²n_a + |ξ₁|²n_b)/ξ² + κ₁m`, `I₂ = κ₂(|ξ₁|²n_a + |ξ₂|²n_b)/ξ² − κ₂m`,
/// `I_m = κ_m n_b`, with `m = 2Re(ξ₁ξ₂⟨c_b†c_a⟩)/ξ²`.
pub fn emission_from_moments(q: &QuadratureState, frame: &CommonModeFrame) -> [f64; 3] {
    let p = &frame.params;
    let xi2 = frame.xi * frame.xi;
    let (w1, w2) = (p.xi1.norm_sqr() / xi2, p.xi2.norm_sqr() / xi2);
    let m = 2.0 * (p.xi1 * p.xi2 * q.cross).re / xi2;
    [
        p.kappa1 * (w2 * q.n_a + w1 * q.n_b + m),
        p.kappa2 * (w1 * q.n_a + w2 * q.n_b - m),
        p.kappa_m * q.n_b,
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatioFlag {
    /// `n_a = 0 < n_b`: only the damped mode is driven.
    SoleDrivingB,
    /// Both populations vanish; the ratio is reported as 0 by convention.
    BothEmpty,
}

impl RatioFlag {
    pub fn describe(&self) -> &'static str {
        match self {
            RatioFlag::SoleDrivingB => "sole driving of the c_b mode",
            RatioFlag::BothEmpty => "both modes empty",
        }
    }
}

/// `n_b/n_a`, with a flag for the degenerate cases.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecouplingRatio {
    pub value: f64,
    pub flag: Option<RatioFlag>,
}

impl DecouplingRatio {
    pub fn finite(value: f64) -> Self {
        Self { value, flag: None }
    }
}

pub(crate) fn ratio_of(n_a: f64, n_b: f64) -> DecouplingRatio {
    let (n_a, n_b) = (n_a.max(0.0), n_b.max(0.0));
    if n_a > 0.0 {
        DecouplingRatio::finite(n_b / n_a)
    } else if n_b > 0.0 {
        DecouplingRatio {
            value: f64::INFINITY,
            flag: Some(RatioFlag::SoleDrivingB),
        }
    } else {
        DecouplingRatio {
            value: 0.0,
            flag: Some(RatioFlag::BothEmpty),
        }
    }
}

/// Population ratio from raw numbers; tiny negative values from rounding are clamped.
pub fn population_ratio(n_a: f64, n_b: f64) -> Result<DecouplingRatio> {
    for (name, v) in [("n_a", n_a), ("n_b", n_b)] {
        if !(v >= -NEGATIVE_TOLERANCE) {
            return Err(Error::Data(format!("population {name} = {v} is negative")));
        }
    }
    Ok(ratio_of(n_a, n_b))
}

pub fn decoupling_ratio(report: &EmissionReport) -> Result<DecouplingRatio> {
    match (report.n_a, report.n_b) {
        (Some(a), Some(b)) => population_ratio(a, b),
        _ => Err(argument("the report has no common-mode populations")),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CalibrationMethod {
    /// Coherent steady state from the closed moment equations (exact for this model).
    #[default]
    Coherent,
    /// Liouvillian steady state of the local-mode model at the recommended cutoff.
    Liouvillian,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CalibrationPoint {
    /// `Ω₁/Ω₂`.
    pub ratio: C64,
    pub i_m: f64,
    pub n_a: f64,
    pub n_b: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationScan {
    pub points: Vec<CalibrationPoint>,
    pub argmin: usize,
    pub argmax: usize,
}

impl CalibrationScan {
    pub fn min(&self) -> &CalibrationPoint {
        &self.points[self.argmin]
    }

    pub fn max(&self) -> &CalibrationPoint {
        &self.points[self.argmax]
    }
}

/// Steady fiber emission `I_m` as the drive ratio `Ω₁/Ω₂` runs over `grid`, with
/// the total drive power `|Ω₁|² + |Ω₂|²` and the phase of `Ω₂` held at their
/// template values.
///
/// The minimum sits where only `c_a` is driven, `Ω₁/Ω₂ = −ξ₂*/ξ₁*`; when the cavity
/// losses are equal the maximum sits where `Ω_a = 0`, `Ω₁/Ω₂ = ξ₁/ξ₂`.
pub fn calibration_scan(
    template: &SystemParams,
    grid: &[C64],
    method: CalibrationMethod,
) -> Result<CalibrationScan> {
    if grid.is_empty() {
        return Err(argument("calibration grid is empty"));
    }
    if template.kappa_m <= 0.0 {
        return Err(domain("calibration needs fiber losses (kappa_m > 0)"));
    }
    if template.omega2.norm() == 0.0 {
        return Err(argument(
            "omega2 must be nonzero to define the ratio omega1/omega2",
        ));
    }
    let points: Vec<CalibrationPoint> = grid
        .par_iter()
        .map(|&ratio| calibration_point(template, ratio, method))
        .collect::<Result<_>>()?;
    let mut argmin = 0;
    let mut argmax = 0;
    for (i, p) in points.iter().enumerate() {
        if p.i_m < points[argmin].i_m {
            argmin = i;
        }
        if p.i_m > points[argmax].i_m {
            argmax = i;
        }
    }
    Ok(CalibrationScan {
        points,
        argmin,
        argmax,
    })
}

fn calibration_point(
    template: &SystemParams,
    ratio: C64,
    method: CalibrationMethod,
) -> Result<CalibrationPoint> {
    // hold |Ω₁|² + |Ω₂|² at the template value, keeping the phase of Ω₂
    let power = template.omega1.norm_sqr() + template.omega2.norm_sqr();
    let omega2 =
        template.omega2 / template.omega2.norm() * (power / (1.0 + ratio.norm_sqr())).sqrt();
    let params = SystemParams {
        omega2,
        ..*template
    }
    .with_omega_ratio(ratio);
    match method {
        CalibrationMethod::Coherent => {
            let q = quadrature_steady_state(&make_frame(&params)?)?;
            Ok(CalibrationPoint {
                ratio,
                i_m: params.kappa_m * q.n_b,
                n_a: q.n_a,
                n_b: q.n_b,
            })
        }
        CalibrationMethod::Liouvillian => {
            let probe = build_local(&params, 1)?;
            let space = recommended_space(&probe, Truncation::PerMode, DEFAULT_TAIL)?;
            let model = build_local_in(&params, &space)?;
            let state = steady_state(&model)?;
            let report = emission_report(&state, &model, None)?;
            Ok(CalibrationPoint {
                ratio,
                i_m: report.i_m(),
                n_a: report.n_a.unwrap_or(0.0),
                n_b: report.n_b.unwrap_or(0.0),
            })
        }
    }
}
