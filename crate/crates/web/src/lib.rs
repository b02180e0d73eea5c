//! Browser bindings. Each export takes and returns JSON so the page needs no
//! generated types; the plain functions underneath are what the tests call.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use sdn::analysis::{decay_analysis, eyring_t60, ned_profile, sabine_t60, schroeder_edc, NED_WINDOW_S};
use sdn::ism::render_rir_ism;
use sdn::network::{MatrixKind, MatrixSpec};
use sdn::scattering::{is_lossless, Weighting};
use sdn::{render_rir, ImpulseResponse, SceneConfig, Vec3};

/// Curves sent to the page are thinned to about this many points.
const PLOT_POINTS: usize = 1200;

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneParams {
    pub room: [f64; 3],
    pub source: [f64; 3],
    pub mic: [f64; 3],
    pub alpha: f64,
    pub matrix: MatrixKind,
    pub duration: f64,
    pub sample_rate: f64,
    pub seed: u64,
    pub direct_path: bool,
}

impl Default for SceneParams {
    fn default() -> Self {
        SceneParams {
            room: [5.0, 4.0, 3.0],
            source: [1.2, 1.5, 1.4],
            mic: [3.7, 2.6, 1.7],
            alpha: 0.3,
            matrix: MatrixKind::Isotropic,
            duration: 0.8,
            sample_rate: 16000.0,
            seed: 0,
            direct_path: true,
        }
    }
}

impl SceneParams {
    fn scene(&self) -> sdn::Result<SceneConfig> {
        let v = |a: [f64; 3]| Vec3::new(a[0], a[1], a[2]);
        let mut s = SceneConfig::new(v(self.room), v(self.source), v(self.mic), self.alpha);
        s.sample_rate = self.sample_rate;
        s.direct_path = self.direct_path;
        let report = sdn::geometry::validate_scene(&s);
        if !report.is_ok() {
            return Err(sdn::Error::InvalidScene(report.violations));
        }
        if !(self.duration > 0.0 && self.duration <= 5.0) {
            return Err(sdn::Error::InvalidArgument("duration must be in (0, 5] s".into()));
        }
        Ok(s)
    }
}

#[derive(Debug, Serialize)]
pub struct Curve {
    pub t: Vec<f64>,
    pub y: Vec<f64>,
}

impl Curve {
    fn thinned(values: &[f64], fs: f64) -> Curve {
        let step = values.len().div_ceil(PLOT_POINTS).max(1);
        let idx = (0..values.len()).step_by(step);
        Curve {
            t: idx.clone().map(|n| n as f64 / fs).collect(),
            y: idx.map(|n| values[n]).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Response {
    pub samples: Vec<f32>,
    pub edc: Curve,
    pub t60: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Comparison {
    pub sample_rate: f64,
    pub sdn: Response,
    pub ism: Response,
    pub sabine: f64,
    pub eyring: f64,
}

fn response(rir: &ImpulseResponse) -> sdn::Result<Response> {
    let edc = schroeder_edc(&rir.samples)?;
    Ok(Response {
        samples: rir.samples.iter().map(|&x| x as f32).collect(),
        edc: Curve::thinned(&edc, rir.sample_rate),
        t60: decay_analysis(rir).ok().map(|d| d.t60),
    })
}

/// Network and image-source responses of the same room with their decay curves.
pub fn compare(p: &SceneParams) -> sdn::Result<Comparison> {
    let scene = p.scene()?;
    let sdn = render_rir(&scene, p.duration, &MatrixSpec::new(p.matrix), p.seed)?;
    let ism = render_rir_ism(&scene, p.duration)?;
    let alpha = [p.alpha; 6];
    Ok(Comparison {
        sample_rate: scene.sample_rate,
        sdn: response(&sdn)?,
        ism: response(&ism)?,
        sabine: sabine_t60(&scene.room_dims, &alpha)?,
        eyring: eyring_t60(&scene.room_dims, &alpha)?,
    })
}

#[derive(Debug, Serialize)]
pub struct EchoDensity {
    pub ism: Curve,
    /// One curve per matrix kind, in the order of `kinds`.
    pub kinds: Vec<String>,
    pub curves: Vec<Curve>,
}

fn ned_curve(rir: &ImpulseResponse) -> sdn::Result<Curve> {
    let n = ned_profile(rir, NED_WINDOW_S)?;
    Ok(Curve { t: n.times, y: n.values })
}

/// Echo density build-up for several scattering matrices against the image sources.
pub fn echo_density(p: &SceneParams, kinds: &[MatrixKind]) -> sdn::Result<EchoDensity> {
    let scene = p.scene()?;
    let mut curves = Vec::with_capacity(kinds.len());
    for &k in kinds {
        curves.push(ned_curve(&render_rir(&scene, p.duration, &MatrixSpec::new(k), p.seed)?)?);
    }
    Ok(EchoDensity {
        ism: ned_curve(&render_rir_ism(&scene, p.duration)?)?,
        kinds: kinds.iter().map(|k| k.to_string()).collect(),
        curves,
    })
}

#[derive(Debug, Serialize)]
pub struct MatrixView {
    pub kind: String,
    pub size: usize,
    /// Row-major entries.
    pub entries: Vec<f64>,
    pub weights: Vec<f64>,
    pub lossless: bool,
    /// Eigenvalues as `[re, im]` pairs.
    pub eigenvalues: Vec<[f64; 2]>,
}

pub fn matrix_view(kind: MatrixKind, size: usize, seed: u64) -> sdn::Result<MatrixView> {
    if !(2..=16).contains(&size) {
        return Err(sdn::Error::InvalidArgument("size must be between 2 and 16".into()));
    }
    let j = sdn::network::Junction::from_spec(&MatrixSpec::new(kind), size, seed)?;
    let a = j.matrix.entries();
    let verdict = is_lossless(a, Weighting::Auto, 1e-9);
    Ok(MatrixView {
        kind: kind.to_string(),
        size,
        entries: (0..size).flat_map(|r| (0..size).map(move |c| a[(r, c)])).collect(),
        weights: j.weights.iter().copied().collect(),
        lossless: verdict.lossless,
        eigenvalues: verdict.eigenvalues.iter().map(|z| [z.re, z.im]).collect(),
    })
}

fn to_js<T: Serialize>(r: sdn::Result<T>) -> Result<String, JsValue> {
    let v = r.map_err(|e| JsValue::from_str(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsValue::from_str(&e.to_string()))
}

fn params(json: &str) -> Result<SceneParams, JsValue> {
    serde_json::from_str(json).map_err(|e| JsValue::from_str(&format!("bad parameters: {e}")))
}

fn kind(name: &str) -> Result<MatrixKind, JsValue> {
    name.parse().map_err(|e: sdn::Error| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen(js_name = compareRooms)]
pub fn compare_rooms(params_json: &str) -> Result<String, JsValue> {
    to_js(compare(&params(params_json)?))
}

#[wasm_bindgen(js_name = echoDensity)]
pub fn echo_density_js(params_json: &str, kinds: &str) -> Result<String, JsValue> {
    let kinds = kinds.split(',').map(|k| kind(k.trim())).collect::<Result<Vec<_>, _>>()?;
    to_js(echo_density(&params(params_json)?, &kinds))
}

#[wasm_bindgen(js_name = scatteringMatrix)]
pub fn scattering_matrix(kind_name: &str, size: usize, seed: u64) -> Result<String, JsValue> {
    to_js(matrix_view(kind(kind_name)?, size, seed))
}
