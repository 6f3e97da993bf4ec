//! Shared fixtures for the benchmarks.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vlcris_core::scenario::{parse_config, Problem};
use vlcris_core::{LcState, Receiver, Scene, SystemParams, UserState, Vec3};

/// Reference room, default mirror array and one LC user.
pub fn reference_scene(params: &SystemParams) -> Scene {
    let lc = LcState::from_refractive_index(1.6, params).expect("index in range");
    let mut user = UserState::holding_at(
        Vec3::new(1.0, 2.0, UserState::DEVICE_HEIGHT),
        180f64.to_radians(),
        41f64.to_radians(),
        Receiver::LiquidCrystal(lc),
    );
    user.body = None;
    let mut scene = Scene::reference(user);
    scene.mirror_array.roll = 0.1;
    scene.mirror_array.yaw = -1.2;
    scene
}

/// The three-variable rate problem on the default scene.
pub fn rate_problem() -> Problem {
    let cfg = parse_config("[params]\nelectric_field = 4.0e6\n").expect("valid config");
    Problem::new(&cfg, &cfg.params, &cfg.scene, cfg.zeta).expect("valid problem")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
