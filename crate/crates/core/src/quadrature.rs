//! Globally adaptive 21-point Gauss-Kronrod quadrature on finite intervals.
//!
//! The error estimate follows QUADPACK's `qk21`: the Gauss/Kronrod difference
//! rescaled by the integrand's variation, floored at the roundoff level.
//! Breakpoints passed by the caller seed the initial partition so that kinks
//! never sit inside a panel.

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_931_783_300,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// 10-point Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    let fc = f(center)?;
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut res_abs = kronrod.abs();
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    if !kronrod.is_finite() {
        return Err(Error::numerical(
            "quadrature",
            format!("integrand is not finite on [{a}, {b}]"),
        ));
    }

    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();

    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Panel { a, b, value, error })
}

/// Integrates `f` over `[points[0], points[last]]`, with the interior points
/// seeding the initial partition. `points` must be nondecreasing; zero-width
/// pieces are skipped.
pub fn integrate<F>(mut f: F, points: &[f64], opts: &QuadOptions) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    if points.len() < 2 || points.iter().any(|p| !p.is_finite()) {
        return Err(Error::domain("integrate", "need at least two finite points"));
    }
    if points.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("integrate", "breakpoints must be nondecreasing"));
    }

    let mut panels = Vec::with_capacity(opts.max_subdivisions.max(points.len()));
    for w in points.windows(2) {
        if w[1] > w[0] {
            panels.push(gauss_kronrod(&mut f, w[0], w[1])?);
        }
    }
    let mut evaluations = 21 * panels.len();
    if panels.is_empty() {
        return Ok(Quadrature {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
            panels: 0,
        });
    }

    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target {
            return Ok(Quadrature {
                value,
                abs_error: error,
                evaluations,
                panels: panels.len(),
            });
        }

        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("nonempty");
        let Panel { a, b, .. } = panels[worst];
        let mid = 0.5 * (a + b);
        let too_narrow = (b - a).abs() <= 1e3 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE);
        if panels.len() >= opts.max_subdivisions || too_narrow {
            return Err(Error::Numerical {
                component: "quadrature".into(),
                detail: format!(
                    "tolerance {target:e} not reached after {} panels (estimate {error:e})",
                    panels.len()
                ),
                error_estimate: Some(error),
            });
        }
        let left = gauss_kronrod(&mut f, a, mid)?;
        let right = gauss_kronrod(&mut f, mid, b)?;
        evaluations += 42;
        panels[worst] = left;
        panels.push(right);
    }
}
