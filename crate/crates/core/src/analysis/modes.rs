use serde::{Deserialize, Serialize};

use crate::network::SdnNetwork;

/// Modes per Hz needed per second of reverberation.
pub const MODE_DENSITY_FACTOR: f64 = 6.7;

/// Total internode delay in seconds, i.e. the modes per Hz of the network.
pub fn mode_density(net: &SdnNetwork) -> f64 {
    net.total_loop_delay()
}

/// Minimum mode density `T60 / 6.7` for a reverberation time.
pub fn min_mode_density(t60: f64) -> f64 {
    t60 / MODE_DENSITY_FACTOR
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeDensity {
    pub modes_per_hz: f64,
    pub required: f64,
    pub sufficient: bool,
}

pub fn mode_density_check(net: &SdnNetwork, t60: f64) -> ModeDensity {
    let modes_per_hz = mode_density(net);
    let required = min_mode_density(t60);
    ModeDensity {
        modes_per_hz,
        required,
        sufficient: modes_per_hz >= required,
    }
}

/// Mode density of a cube of edge `edge` with source and microphone at the centre.
pub fn cubic_mode_density(edge: f64, sound_speed: f64) -> f64 {
    (6.0 + 24.0 * std::f64::consts::SQRT_2 / 2.0) * edge / sound_speed
}

/// Edge above which a centred cube has enough modes for `t60`.
pub fn cubic_edge_threshold(t60: f64, sound_speed: f64) -> f64 {
    min_mode_density(t60) * sound_speed / (6.0 + 12.0 * std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{SceneConfig, Vec3};
    use crate::network::{build_network, MatrixSpec};

    #[test]
    fn cube_closed_form() {
        let d = cubic_mode_density(5.0, 343.0);
        assert!((d - 0.3349).abs() < 1e-3);
        assert!((d / (23.0 * 5.0 / 343.0) - 1.0).abs() < 0.02);
        assert!((cubic_edge_threshold(1.0, 343.0) - 2.229).abs() < 1e-3);
    }

    #[test]
    fn network_matches_closed_form() {
        let mut scene = SceneConfig::new(Vec3::repeat(5.0), Vec3::repeat(2.5), Vec3::repeat(2.5), 0.5);
        scene.direct_path = false;
        let net = build_network(&scene, &MatrixSpec::default(), 0).unwrap();
        let d = mode_density(&net);
        // floored delays lose at most one sample per line
        assert!(d <= cubic_mode_density(5.0, 343.0));
        assert!(cubic_mode_density(5.0, 343.0) - d < 30.0 / 44100.0);
        let check = mode_density_check(&net, 0.27);
        assert!(check.sufficient);
    }
}
