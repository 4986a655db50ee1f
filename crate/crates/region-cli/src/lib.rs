//! Region scanning, the footrule-rho similarity bracket, and the CSV/SVG
//! emitters behind the command-line tool.

use anyhow::{bail, Context, Result};
use copula_core::extremal::{
    attained_curve_r, family_ca, family_cn, kdelta_a, lower_bound_curve, upper_estimate_curve,
};
use copula_core::measures::{footrule_phi_quadrature, spearman_rho_quadrature};
use copula_core::{footrule_phi, generate, spearman_rho, Copula, Mixture};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// One scanned (footrule, rho) pair with its provenance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegionPoint {
    pub phi: f64,
    pub rho: f64,
    pub source: String,
    pub on_lower: bool,
    pub on_r: bool,
}

pub const CURVE_FLAG_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    RandomDsShuffle,
    FamilyCa,
    FamilyCn,
    KdeltaA,
    Mixtures,
}

impl Generator {
    pub fn all() -> Vec<Generator> {
        vec![
            Generator::RandomDsShuffle,
            Generator::FamilyCa,
            Generator::FamilyCn,
            Generator::KdeltaA,
            Generator::Mixtures,
        ]
    }
}

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub count: usize,
    pub seed: u64,
    pub generators: Vec<Generator>,
}

impl ScanConfig {
    pub fn new(count: usize, seed: u64) -> Self {
        ScanConfig {
            count,
            seed,
            generators: Generator::all(),
        }
    }
}

fn index_rng(seed: u64, idx: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Generate `count` region points, cycling deterministically through the
/// configured generators with per-index derived seeds. Every point is
/// checked against the region bounds before it is returned.
pub fn scan_region(cfg: &ScanConfig) -> Result<Vec<RegionPoint>> {
    if cfg.count == 0 || cfg.generators.is_empty() {
        bail!("scan needs count >= 1 and at least one generator");
    }
    let mut out = Vec::with_capacity(cfg.count);
    for idx in 0..cfg.count {
        let mut rng = index_rng(cfg.seed, idx);
        let gen = cfg.generators[idx % cfg.generators.len()];
        let (phi, rho, source) = scan_one(gen, &mut rng)?;
        let point = flag_point(phi, rho, source)?;
        out.push(point);
    }
    Ok(out)
}

fn flag_point(phi: f64, rho: f64, source: String) -> Result<RegionPoint> {
    let p = phi.clamp(-0.5, 1.0);
    let lower = lower_bound_curve(p).expect("clamped");
    let upper = upper_estimate_curve(p).expect("clamped");
    if rho < lower - CURVE_FLAG_TOL || rho > upper + CURVE_FLAG_TOL {
        bail!(
            "region invariant violated by {source}: phi = {phi}, rho = {rho}, \
             bounds [{lower}, {upper}]"
        );
    }
    let on_r = match attained_curve_r(p) {
        Ok(r) => (rho - r).abs() <= CURVE_FLAG_TOL,
        Err(_) => false,
    };
    Ok(RegionPoint {
        phi,
        rho,
        source,
        on_lower: (rho - lower).abs() <= CURVE_FLAG_TOL,
        on_r,
    })
}

fn scan_one(gen: Generator, rng: &mut ChaCha8Rng) -> Result<(f64, f64, String)> {
    match gen {
        Generator::RandomDsShuffle => {
            let m = 2 * rng.gen_range(2..=4usize);
            let s = generate::random_doubly_symmetric_shuffle(rng, m);
            let c = Copula::Shuffle(s);
            Ok((footrule_phi(&c)?, spearman_rho(&c)?, format!("ds-shuffle(m={m})")))
        }
        Generator::FamilyCa => {
            let a = 0.5 * rng.gen::<f64>();
            let c = Copula::Shuffle(family_ca(a)?);
            Ok((footrule_phi(&c)?, spearman_rho(&c)?, format!("Ca(a={a:.6})")))
        }
        Generator::FamilyCn => {
            let n = rng.gen_range(1..=20usize);
            let c = Copula::Shuffle(family_cn(n)?);
            Ok((footrule_phi(&c)?, spearman_rho(&c)?, format!("Cn(n={n})")))
        }
        Generator::KdeltaA => {
            let a = 0.25 + 0.25 * rng.gen::<f64>();
            let k = Copula::Diagonal(kdelta_a(a)?);
            // tighter quadrature than the default so the flag tolerance is
            // not eaten by integration error at the corner phi = -1/2
            let phi = footrule_phi_quadrature(&k, 1e-11)?;
            let rho = spearman_rho_quadrature(&k, 1e-10)?;
            Ok((phi, rho, format!("Kdelta(a={a:.6})")))
        }
        Generator::Mixtures => {
            let t: f64 = rng.gen();
            let first = Copula::Shuffle(family_ca(0.5 * rng.gen::<f64>())?);
            let second = match rng.gen_range(0..3u8) {
                0 => Copula::Shuffle(family_cn(rng.gen_range(1..=12usize))?),
                1 => Copula::Shuffle(generate::random_doubly_symmetric_shuffle(rng, 4)),
                _ => Copula::Pi,
            };
            let mix = Copula::Mixture(Mixture::new(vec![(t, first), (1.0 - t, second)])?);
            Ok((
                footrule_phi(&mix)?,
                spearman_rho(&mix)?,
                format!("mix(t={t:.6})"),
            ))
        }
    }
}

/// CSV with columns `phi,rho,source,on_lower,on_r`.
pub fn points_to_csv(points: &[RegionPoint]) -> String {
    let mut out = String::from("phi,rho,source,on_lower,on_r\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.phi, p.rho, p.source, p.on_lower, p.on_r
        ));
    }
    out
}

pub fn points_from_csv(csv: &str) -> Result<Vec<RegionPoint>> {
    let mut out = Vec::new();
    for (lineno, line) in csv.lines().enumerate() {
        if lineno == 0 || line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            bail!("line {}: expected 5 CSV fields", lineno + 1);
        }
        out.push(RegionPoint {
            phi: fields[0].parse().context("phi")?,
            rho: fields[1].parse().context("rho")?,
            source: fields[2].to_string(),
            on_lower: fields[3].parse().context("on_lower")?,
            on_r: fields[4].parse().context("on_r")?,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// SVG rendering
// ---------------------------------------------------------------------------

const SVG_W: f64 = 840.0;
const SVG_H: f64 = 640.0;
const MARGIN: f64 = 60.0;

fn sx(phi: f64) -> f64 {
    MARGIN + (phi + 0.5) / 1.5 * (SVG_W - 2.0 * MARGIN)
}

fn sy(rho: f64) -> f64 {
    SVG_H - MARGIN - (rho + 1.0) / 2.0 * (SVG_H - 2.0 * MARGIN)
}

fn polyline(xs: impl Iterator<Item = (f64, f64)>, style: &str) -> String {
    let pts: Vec<String> = xs
        .map(|(x, y)| format!("{:.3},{:.3}", sx(x), sy(y)))
        .collect();
    format!("<polyline fill=\"none\" {} points=\"{}\"/>\n", style, pts.join(" "))
}

/// Deterministic SVG of the region: lower bound and attained curve solid,
/// upper estimate dashed, scan points as dots. A pure function of its
/// inputs; reruns are byte-identical.
pub fn region_svg(points: &[RegionPoint]) -> String {
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" \
         viewBox=\"0 0 {SVG_W} {SVG_H}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // axes
    svg.push_str(&format!(
        "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"black\"/>\n",
        sx(-0.5),
        sy(-1.0),
        sx(1.0),
        sy(-1.0)
    ));
    svg.push_str(&format!(
        "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"black\"/>\n",
        sx(-0.5),
        sy(-1.0),
        sx(-0.5),
        sy(1.0)
    ));
    for prop in [-0.5f64, 0.0, 0.5, 1.0] {
        svg.push_str(&format!(
            "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"12\" text-anchor=\"middle\">{prop}</text>\n",
            sx(prop),
            SVG_H - MARGIN + 20.0
        ));
    }
    for rho in [-1.0f64, -0.5, 0.0, 0.5, 1.0] {
        svg.push_str(&format!(
            "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"12\" text-anchor=\"end\">{rho}</text>\n",
            MARGIN - 8.0,
            sy(rho) + 4.0
        ));
    }
    let grid = |f: fn(f64) -> f64| {
        (0..=600).map(move |i| {
            let x = -0.5 + 1.5 * i as f64 / 600.0;
            (x, f(x))
        })
    };
    svg.push_str(&polyline(
        grid(|x| lower_bound_curve(x).expect("in range")),
        "stroke=\"black\" stroke-width=\"1.5\"",
    ));
    svg.push_str(&polyline(
        grid(|x| attained_curve_r(x).unwrap_or(1.0)),
        "stroke=\"black\" stroke-width=\"1.5\"",
    ));
    svg.push_str(&polyline(
        grid(|x| upper_estimate_curve(x).expect("in range")),
        "stroke=\"black\" stroke-width=\"1\" stroke-dasharray=\"6,4\"",
    ));
    for p in points {
        svg.push_str(&format!(
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"2\" fill=\"steelblue\" fill-opacity=\"0.6\"/>\n",
            sx(p.phi.clamp(-0.5, 1.0)),
            sy(p.rho.clamp(-1.0, 1.0))
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

// ---------------------------------------------------------------------------
// similarity measure
// ---------------------------------------------------------------------------

/// Bracket for the similarity measure between footrule and rho: one minus the
/// normalized area of the exact region. The true area lies between the area
/// under the attained curve and the area under the upper estimate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KsmBracket {
    pub lower: f64,
    pub upper: f64,
    pub area_lower: f64,
    pub area_upper: f64,
    pub series_truncation: usize,
    pub tail_bound: f64,
}

const KSM_SERIES_N: usize = 100_000;

/// Compute the similarity bracket.
///
/// The area between the upper estimate and the lower bound has the closed
/// form evaluated from antiderivatives; the area between the attained curve
/// and the lower bound sums the chord trapezoids up to `series_truncation`
/// and closes the telescoping remainder analytically, dropping a correction
/// below `tail_bound`.
pub fn compute_ksm() -> KsmBracket {
    let sqrt3 = 3.0f64.sqrt();
    // antiderivative of the upper estimate 1 - (2/3)(1-x)^2
    let a_up = |x: f64| x + 2.0 / 9.0 * (1.0 - x).powi(3);
    // antiderivative of the lower bound (2 sqrt3 / 9)(1+2x)^{3/2} - 1
    let a_low = |x: f64| 2.0 * sqrt3 / 45.0 * (1.0 + 2.0 * x).powf(2.5) - x;
    let int_lower = a_low(1.0) - a_low(-0.5);
    let area_upper = (a_up(1.0) - a_up(-0.5)) - int_lower;

    // attained curve: arc piece, chord piece, then the trapezoid series
    let a_arc = |x: f64| x * x + 0.5 * x - sqrt3 / 45.0 * (1.0 + 2.0 * x).powf(2.5);
    let piece1 = a_arc(-0.125) - a_arc(-0.5);
    let a_chord = |x: f64| 2.0 / 3.0 * x * x + 7.0 / 24.0 * x;
    let piece2 = a_chord(0.25) - a_chord(-0.125);
    let mut series = 0.0;
    for n in 2..=KSM_SERIES_N {
        let nf = n as f64;
        let width = 1.5 / (nf * (nf + 1.0));
        let r_left = 1.0 - 1.5 / (nf * nf);
        let r_right = 1.0 - 1.5 / ((nf + 1.0) * (nf + 1.0));
        series += 0.5 * (r_left + r_right) * width;
    }
    // telescoped remainder of the chord widths; the dropped part is the
    // quadratic correction, bounded by (9/4) / N^3
    let tail = 1.5 / (KSM_SERIES_N as f64 + 1.0);
    let tail_bound = 2.25 / (KSM_SERIES_N as f64).powi(3);
    let area_lower = piece1 + piece2 + series + tail - int_lower;

    // normalization (1 - phi(W)) (1 - rho(W)) = 3, computed from the measures
    let denom = (1.0 - footrule_phi(&Copula::W).expect("W"))
        * (1.0 - spearman_rho(&Copula::W).expect("W"));
    KsmBracket {
        lower: 1.0 - area_upper / denom,
        upper: 1.0 - area_lower / denom,
        area_lower,
        area_upper,
        series_truncation: KSM_SERIES_N,
        tail_bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ksm_bracket_matches_the_closed_forms() {
        let k = compute_ksm();
        assert!((k.area_upper - 21.0 / 20.0).abs() < 1e-9, "{}", k.area_upper);
        assert!((k.lower - 0.65).abs() < 1e-9, "{}", k.lower);
        let pi = std::f64::consts::PI;
        let expect_upper = 121.0 / 64.0 - pi * pi / 8.0;
        assert!((k.upper - expect_upper).abs() < 1e-6, "{}", k.upper);
        let expect_area = 3.0 * pi * pi / 8.0 - 171.0 / 64.0;
        assert!((k.area_lower - expect_area).abs() < 3e-6, "{}", k.area_lower);
        assert!(k.lower <= k.upper);
        assert!(k.tail_bound < 1e-9);
    }

    #[test]
    fn scan_is_deterministic_and_in_bounds() {
        let cfg = ScanConfig::new(40, 7);
        let a = scan_region(&cfg).unwrap();
        let b = scan_region(&cfg).unwrap();
        assert_eq!(points_to_csv(&a), points_to_csv(&b));
        assert_eq!(a.len(), 40);
    }

    #[test]
    fn family_generators_land_on_their_curves() {
        let ca_only = ScanConfig {
            count: 101,
            seed: 3,
            generators: vec![Generator::FamilyCa],
        };
        for p in scan_region(&ca_only).unwrap() {
            assert!(p.on_lower, "Ca point off the lower curve: {p:?}");
        }
        let cn_only = ScanConfig {
            count: 40,
            seed: 3,
            generators: vec![Generator::FamilyCn],
        };
        for p in scan_region(&cn_only).unwrap() {
            assert!(p.on_r, "Cn point off the attained curve: {p:?}");
        }
    }

    #[test]
    fn ds_shuffle_scan_has_zero_invariant_violations() {
        // scan_region bails on any out-of-region point, so success is the
        // assertion
        let cfg = ScanConfig {
            count: 10_000,
            seed: 42,
            generators: vec![Generator::RandomDsShuffle],
        };
        let pts = scan_region(&cfg).unwrap();
        assert_eq!(pts.len(), 10_000);
    }

    #[test]
    fn csv_round_trip() {
        let pts = scan_region(&ScanConfig::new(10, 1)).unwrap();
        let csv = points_to_csv(&pts);
        let back = points_from_csv(&csv).unwrap();
        assert_eq!(back.len(), pts.len());
        assert_eq!(back[3].source, pts[3].source);
        assert_eq!(back[3].phi, pts[3].phi);
    }

    #[test]
    fn svg_is_a_pure_function_of_points() {
        let pts = scan_region(&ScanConfig::new(10, 1)).unwrap();
        assert_eq!(region_svg(&pts), region_svg(&pts));
        assert!(region_svg(&pts).starts_with("<svg"));
    }

    #[test]
    fn mixtures_witness_region_convexity() {
        // the (phi, rho) pair of a mixture of scanned copulas is the convex
        // combination of the endpoints' pairs, so the region is convex
        use copula_core::extremal::family_ca;
        use copula_core::generate::random_doubly_symmetric_shuffle;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..20 {
            let a = match rng.gen_range(0..3u8) {
                0 => Copula::Shuffle(family_ca(0.5 * rng.gen::<f64>()).unwrap()),
                1 => Copula::Shuffle(family_cn(rng.gen_range(1..=15)).unwrap()),
                _ => Copula::Shuffle(random_doubly_symmetric_shuffle(&mut rng, 4)),
            };
            let b = Copula::Shuffle(random_doubly_symmetric_shuffle(&mut rng, 6));
            let (pa, ra) = (footrule_phi(&a).unwrap(), spearman_rho(&a).unwrap());
            let (pb, rb) = (footrule_phi(&b).unwrap(), spearman_rho(&b).unwrap());
            for t in [0.25, 0.5, 0.75] {
                let mix = Copula::Mixture(
                    Mixture::new(vec![(t, a.clone()), (1.0 - t, b.clone())]).unwrap(),
                );
                let pm = footrule_phi(&mix).unwrap();
                let rm = spearman_rho(&mix).unwrap();
                assert!((pm - (t * pa + (1.0 - t) * pb)).abs() < 1e-10);
                assert!((rm - (t * ra + (1.0 - t) * rb)).abs() < 1e-10);
            }
        }
    }
}
