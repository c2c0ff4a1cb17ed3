use crossview_guide::perception::{Cell, Costmap2D};
use crossview_guide::planner::{
    admittance_map, attractive_force, attractive_potential, repulsive_force, ApfParams, CommandSource, ForceVector,
    VelocityCommand,
};
use nalgebra::Vector2;
use proptest::prelude::*;

fn pt() -> impl Strategy<Value = Vector2<f64>> {
    (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y)| Vector2::new(x, y))
}

proptest! {
    #[test]
    fn attraction_is_negative_gradient(p in pt(), g in pt(), k in 0.1..3.0f64) {
        let f = attractive_force(&p, &g, k);
        let h = 1e-6;
        let dx = (attractive_potential(&(p + Vector2::new(h, 0.0)), &g, k) - attractive_potential(&(p - Vector2::new(h, 0.0)), &g, k)) / (2.0 * h);
        let dy = (attractive_potential(&(p + Vector2::new(0.0, h)), &g, k) - attractive_potential(&(p - Vector2::new(0.0, h)), &g, k)) / (2.0 * h);
        prop_assert!((f.fx + dx).abs() < 1e-5 && (f.fy + dy).abs() < 1e-5);
    }

    #[test]
    fn repulsion_points_away_and_vanishes_beyond_d0(dx in -1.5..1.5f64, dy in -1.5..1.5f64) {
        let mut m = Costmap2D::new(Vector2::new(-2.0, -2.0), 0.05, 80, 80).unwrap();
        m.set(40, 40, Cell::Occupied);
        let c = m.cell_center(40, 40);
        let robot = c + Vector2::new(dx, dy);
        let d = (robot - c).norm();
        let f = repulsive_force(&robot, &m, 0.15, 1.0);
        if d >= 1.0 || d == 0.0 {
            prop_assert_eq!(f, ForceVector::default());
        } else {
            prop_assert!(f.fx * dx + f.fy * dy >= 0.0);
        }
    }

    #[test]
    fn admittance_respects_limits(fx in -50.0..50.0f64, fy in -50.0..50.0f64, pv in 0.0..0.6f64, pw in -1.2..1.2f64) {
        let p = ApfParams::default();
        let prev = VelocityCommand::new(pv, 0.0, pw, 0.0, CommandSource::Apf);
        let c = admittance_map(&ForceVector::new(fx, fy), &p, &prev, 0.1);
        prop_assert!(c.v_x >= 0.0 && c.v_x <= p.v_max);
        prop_assert!(c.w_z.abs() <= p.w_max);
        prop_assert_eq!(c.v_y, 0.0);
        prop_assert_eq!(c.source, CommandSource::Apf);
    }
}

#[test]
fn smoothing_converges_to_target() {
    let p = ApfParams::default();
    let f = ForceVector::new(0.6, 0.0);
    let mut c = VelocityCommand::zero(CommandSource::Apf, 0.0);
    for k in 0..100 {
        c = admittance_map(&f, &p, &c, k as f64 * 0.1);
    }
    assert!((c.v_x - p.admittance_gain * 0.6).abs() < 1e-9);
    assert!(c.w_z.abs() < 1e-12);
}

#[test]
fn parameter_validation_names_the_field() {
    let bad = ApfParams { smoothing: 0.0, ..ApfParams::default() };
    assert_eq!(bad.validate(0.05).unwrap_err().0, "smoothing");
    let bad = ApfParams { d0: 0.04, ..ApfParams::default() };
    assert_eq!(bad.validate(0.05).unwrap_err().0, "d0_m");
    assert!(ApfParams::default().validate(0.05).is_ok());
}
