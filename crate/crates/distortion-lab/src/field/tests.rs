use super::*;
use crate::growth::GrowthFunction;

fn laminate_profile_mapping(t1: f64, t2: f64, lambda: f64, j: u32, n: usize) -> GridMapping {
    let p = 2.0_f64.powi(-(j as i32));
    let profile = if lambda == 0.0 {
        Profile1D::periodic(p, vec![0.0, p], vec![t2])
    } else if lambda == 1.0 {
        Profile1D::periodic(p, vec![0.0, p], vec![t1])
    } else {
        Profile1D::periodic(p, vec![0.0, lambda * p, p], vec![t1, t2])
    };
    GridMapping::new(
        BoxDomain::unit(n),
        vec![8, 8, 2usize.pow(j + 3).min(512)],
        MapSource::Profile {
            axis: n - 1,
            profile,
        },
    )
    .unwrap()
}

#[test]
fn affine_jacobian_is_exact() {
    let m = GridMapping::affine_stretch(3.0, 3).unwrap();
    let jac = m.jacobian(0).unwrap();
    assert_eq!(jac, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 3.0]);
}

#[test]
fn sampled_affine_jacobian_matches() {
    let m = GridMapping::affine_stretch(3.0, 3).unwrap().sample();
    // interior cell (4,4,4) of the 8³ grid
    let cell = (4 * 8 + 4) * 8 + 4;
    let jac = m.jacobian(cell).unwrap();
    let expected = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 3.0];
    for (a, b) in jac.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-12, "{jac:?}");
    }
}

#[test]
fn sampled_boundary_cell_is_refused() {
    let m = GridMapping::affine_stretch(2.0, 3).unwrap().sample();
    assert!(matches!(m.jacobian(0), Err(FieldError::BoundaryCell(0))));
}

#[test]
fn quadratic_derivative_is_exact_for_central_differences() {
    // y₃ = x₃²: symmetric stencils are exact on quadratics
    let quad = |res: usize| {
        let m = GridMapping::new(
            BoxDomain::new(vec![0.0, 0.0, 0.5], vec![1.0, 1.0, 1.5]).unwrap(),
            vec![4, 4, res],
            MapSource::Affine(AffineMap::stretch_last_axis(3, 1.0)),
        )
        .unwrap();
        let mut sampled = m.sample();
        let total: usize = sampled.node_counts().iter().product();
        if let MapSource::Sampled(v) = &mut sampled.source {
            for flat in 0..total {
                let x3 = v[flat * 3 + 2];
                v[flat * 3 + 2] = x3 * x3;
            }
        }
        sampled
    };
    for res in [8, 16] {
        let m = quad(res);
        // find the interior cell whose center has x₃ = 1
        let coords = vec![2, 2, res / 2];
        let center = m.cell_center(&coords);
        assert!((center[2] - (1.0 + 0.5 / res as f64)).abs() < 1e-12);
        let flat = (coords[0] * 4 + coords[1]) * res + coords[2];
        let jac = m.jacobian(flat).unwrap();
        let want = 2.0 * center[2];
        assert!(
            (jac[2 * 3 + 2] - want).abs() < 1e-10,
            "res {res}: derivative {} vs {want}",
            jac[2 * 3 + 2]
        );
    }
}

#[test]
fn cubic_derivative_has_second_order_error() {
    // y₃ = x₃³ on a box away from zero; halving the step divides the
    // error by ≈ 4
    let build = |res: usize| {
        let m = GridMapping::new(
            BoxDomain::new(vec![0.0, 0.0, 0.5], vec![1.0, 1.0, 1.5]).unwrap(),
            vec![4, 4, res],
            MapSource::Affine(AffineMap::stretch_last_axis(3, 1.0)),
        )
        .unwrap();
        let mut sampled = m.sample();
        let total: usize = sampled.node_counts().iter().product();
        if let MapSource::Sampled(v) = &mut sampled.source {
            for flat in 0..total {
                let x3 = v[flat * 3 + 2];
                v[flat * 3 + 2] = x3 * x3 * x3;
            }
        }
        sampled
    };
    let err_at = |res: usize| -> f64 {
        let m = build(res);
        let coords = vec![2, 2, res / 2];
        let center = m.cell_center(&coords);
        let flat = (coords[0] * 4 + coords[1]) * res + coords[2];
        let jac = m.jacobian(flat).unwrap();
        (jac[2 * 3 + 2] - 3.0 * center[2] * center[2]).abs()
    };
    // compare errors at matching physical points: cell centers line up
    // when the resolution doubles (res/2-th cell of res cells is offset
    // by half a cell, so compare convergence order via the ratio at the
    // shared step sizes h and h/2 at nearly identical centers)
    let e1 = err_at(16);
    let e2 = err_at(32);
    let ratio = e1 / e2;
    assert!(
        (2.5..6.5).contains(&ratio),
        "expected ≈ 4 error reduction, got {ratio} ({e1} vs {e2})"
    );
}

#[test]
fn outer_dilatation_of_axis_stretch() {
    // diag(1, 1, t) with t ≥ 1 has K = t², P = t
    let d = stretch_dilatation(3.0, 3);
    assert_eq!(d.op_norm, 3.0);
    assert_eq!(d.jac_det, 3.0);
    assert!((d.k - 9.0).abs() < 1e-12);
    assert!((d.p - 3.0).abs() < 1e-12);
}

#[test]
fn outer_dilatation_conventions() {
    let zero = vec![0.0; 9];
    let d = outer_dilatation(&zero, 3);
    assert_eq!(d.k, 1.0);
    assert_eq!(d.p, 1.0);

    // singular but nonzero
    let mut singular = vec![0.0; 9];
    singular[0] = 1.0;
    let d = outer_dilatation(&singular, 3);
    assert_eq!(d.k, f64::INFINITY);
    assert_eq!(d.p, f64::INFINITY);
}

#[test]
fn contraction_dilatation() {
    // diag(1, 1, 1/4): op_norm 1, |J| = 1/4, K = 4, P = 2
    let d = stretch_dilatation(0.25, 3);
    assert_eq!(d.op_norm, 1.0);
    assert_eq!(d.jac_det, 0.25);
    assert!((d.k - 4.0).abs() < 1e-14);
    assert!((d.p - 2.0).abs() < 1e-14);
}

#[test]
fn identity_field_is_trivial() {
    let m = GridMapping::affine_stretch(1.0, 3).unwrap();
    let f = dilatation_field(&m);
    assert!(f.ks.iter().all(|&k| k == 1.0));
    assert!(f.ps.iter().all(|&p| p == 1.0));
}

#[test]
fn laminate_field_takes_two_values() {
    let m = laminate_profile_mapping(1.0, 3.0, 0.5, 2, 3);
    let f = dilatation_field(&m);
    for &p in &f.ps {
        assert!(
            (p - 1.0).abs() < 1e-12 || (p - 3.0).abs() < 1e-12,
            "unexpected P value {p}"
        );
    }
    // measure fractions (1/2, 1/2) per unit cube via the exact profile
    if let Some(AnalyticP::AxisStep { step, .. }) = f.analytic() {
        let m1 = step.integrate_of(0.0, 1.0, &|p| if (p - 1.0).abs() < 1e-9 { 1.0 } else { 0.0 });
        assert!((m1 - 0.5).abs() < 1e-12);
    } else {
        panic!("laminate field should carry the analytic description");
    }
}

#[test]
fn cantor_limit_field_measures_the_set() {
    let set = CantorSet::with_measure(0.5);
    let m = GridMapping::new(
        BoxDomain::unit(3),
        vec![4, 4, 243],
        MapSource::Profile {
            axis: 2,
            profile: Profile1D::CantorLimit { set, tau0: 2.0 },
        },
    )
    .unwrap();
    let f = dilatation_field(&m);
    let frac = f.ps.iter().filter(|p| p.is_infinite()).count() as f64 / f.cell_count() as f64;
    // cell centers classified against the true set; the boundary error
    // at 3⁻⁵-ish cells stays within a few percent of λ = 1/2
    assert!(
        (frac - 0.5).abs() < 0.08,
        "fraction of infinite-P cells {frac}"
    );
    // exact measure from the analytic description
    if let Some(AnalyticP::AxisStep { step, .. }) = f.analytic() {
        let m_inf = step.integrate_of(0.0, 1.0, &|p| if p.is_infinite() { 1.0 } else { 0.0 });
        assert!((m_inf - 0.5).abs() < 1e-12);
    }
}

#[test]
fn holder_estimate_on_affine_stretch() {
    // both sides are computable in closed form and agree
    let m = GridMapping::affine_stretch(2.0, 3).unwrap();
    let r = holder_estimate(&m, 2.0).unwrap();
    assert!((r.p - 2.0).abs() < 1e-12);
    assert!((r.lhs - 2.0).abs() < 1e-9, "lhs {}", r.lhs);
    assert!((r.rhs - 2.0).abs() < 1e-9, "rhs {}", r.rhs);
    assert!(r.holds);
}

#[test]
fn holder_estimate_on_identity() {
    let m = GridMapping::affine_stretch(1.0, 3).unwrap();
    let r = holder_estimate(&m, 2.0).unwrap();
    assert!(r.holds);
    assert!((r.lhs - 1.0).abs() < 1e-9);
}

#[test]
fn holder_estimate_on_laminates() {
    for j in 1..=4 {
        let m = laminate_profile_mapping(1.0, 3.0, 0.5, j, 3);
        let r = holder_estimate(&m, 2.0).unwrap();
        assert!(r.holds, "j = {j}: lhs {} rhs {}", r.lhs, r.rhs);
    }
}

#[test]
fn holder_estimate_rejects_infinite_dilatation() {
    let set = CantorSet::with_measure(0.5);
    let m = GridMapping::new(
        BoxDomain::unit(3),
        vec![2, 2, 27],
        MapSource::Profile {
            axis: 2,
            profile: Profile1D::CantorLimit { set, tau0: 2.0 },
        },
    )
    .unwrap();
    assert!(matches!(
        holder_estimate(&m, 2.0),
        Err(FieldError::InfiniteDilatation { .. })
    ));
}

#[test]
fn diameter_ratio_is_scale_free_for_affine() {
    let m = GridMapping::affine_stretch(2.0, 3).unwrap();
    let g = GrowthFunction::monomial(4.0);
    let cubes: Vec<BoxDomain> = (0..5)
        .map(|k| {
            let s = 0.5_f64.powi(k);
            BoxDomain::new(vec![0.0; 3], vec![s; 3]).unwrap()
        })
        .collect();
    let r = calderon_diameter_check(&m, &g, &cubes).unwrap();
    let ratios: Vec<f64> = r.entries.iter().map(|e| e.3).collect();
    for w in ratios.windows(2) {
        assert!(
            (w[0] - w[1]).abs() < 1e-9 * w[0].abs(),
            "ratio should be scale-free: {ratios:?}"
        );
    }
    assert!(r.bounded);
}

#[test]
fn diameter_check_on_identity_closed_form() {
    let m = GridMapping::affine_stretch(1.0, 3).unwrap();
    let g = GrowthFunction::monomial(4.0);
    let cube = BoxDomain::new(vec![0.0; 3], vec![0.5; 3]).unwrap();
    let r = calderon_diameter_check(&m, &g, &[cube.clone()]).unwrap();
    let (_, diam, energy, _) = &r.entries[0];
    assert!((diam - cube.diameter()).abs() < 1e-12);
    // |∇ id| = √3; energy = (√3)⁴ · vol = 9/8
    assert!((energy - 9.0 * 0.125).abs() < 1e-12, "energy {energy}");
}

#[test]
fn diameter_check_bounded_across_laminate_index() {
    let g = GrowthFunction::monomial(4.0);
    let cube = BoxDomain::new(vec![0.2; 3], vec![0.7; 3]).unwrap();
    let mut ratios = Vec::new();
    for j in 1..=6 {
        let m = laminate_profile_mapping(1.0, 3.0, 0.5, j, 3);
        let r = calderon_diameter_check(&m, &g, &[cube.clone()]).unwrap();
        ratios.push(r.max_ratio);
    }
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(max / min < 1.5, "ratios across j should stay comparable: {ratios:?}");
}

#[test]
fn diameter_check_requires_calderon_condition() {
    let m = GridMapping::affine_stretch(2.0, 3).unwrap();
    let linear = GrowthFunction::identity();
    let cube = BoxDomain::new(vec![0.0; 3], vec![0.5; 3]).unwrap();
    assert!(matches!(
        calderon_diameter_check(&m, &linear, &[cube]),
        Err(FieldError::Precondition(_))
    ));
}

#[test]
fn sampled_field_reproduces_analytic_dilatations() {
    // resolution 64 per axis, cells away from slab interfaces
    let analytic = laminate_profile_mapping(1.0, 3.0, 0.5, 1, 3);
    let analytic = analytic.with_resolution(vec![64, 64, 64]).unwrap();
    let sampled = analytic.sample();
    let fa = dilatation_field(&analytic);
    let fs = dilatation_field(&sampled);
    let mut checked = 0;
    for cell in 0..analytic.cell_count() {
        let coords = analytic.cell_coords(cell);
        if coords.iter().zip(analytic.resolution()).any(|(&c, &r)| c == 0 || c + 1 == r) {
            continue;
        }
        // skip cells whose 3-cell stencil can touch a slab interface
        let x3 = analytic.cell_center(&coords)[2];
        let h3 = analytic.cell_sizes()[2];
        let dist = [0.0, 0.25, 0.5, 0.75, 1.0]
            .iter()
            .map(|b| (x3 - b).abs())
            .fold(f64::INFINITY, f64::min);
        if dist < 2.0 * h3 {
            continue;
        }
        checked += 1;
        assert!(
            (fa.ks[cell] - fs.ks[cell]).abs() < 1e-9,
            "cell {cell}: K {} vs {}",
            fa.ks[cell],
            fs.ks[cell]
        );
        assert!((fa.ps[cell] - fs.ps[cell]).abs() < 1e-9);
    }
    assert!(checked > 10_000, "too few interior cells checked: {checked}");
}

#[test]
fn dilatation_is_scale_invariant() {
    // replacing f by c·f leaves K and P unchanged
    let base = AffineMap {
        matrix: vec![2.0, 0.3, 0.0, 0.1, 1.0, 0.0, 0.0, 0.4, 0.5],
        offset: vec![0.0; 3],
    };
    let d1 = outer_dilatation(&base.matrix, 3);
    let scaled: Vec<f64> = base.matrix.iter().map(|x| x * 7.5).collect();
    let d2 = outer_dilatation(&scaled, 3);
    assert!((d1.k - d2.k).abs() < 1e-12 * d1.k);
    assert!((d1.p - d2.p).abs() < 1e-12 * d1.p);
}

#[test]
fn dilatation_is_rotation_invariant() {
    let c = 0.6_f64;
    let s = 0.8_f64;
    // rotation in the (0,1)-plane
    let rot = vec![c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0];
    let a = vec![2.0, 0.3, 0.0, 0.1, 1.0, 0.0, 0.0, 0.4, 0.5];
    let d = outer_dilatation(&a, 3);
    let left = outer_dilatation(&crate::linalg::mat_mul(&rot, &a, 3), 3);
    let right = outer_dilatation(&crate::linalg::mat_mul(&a, &rot, 3), 3);
    for other in [left, right] {
        assert!((d.op_norm - other.op_norm).abs() < 1e-10 * d.op_norm);
        assert!((d.jac_det.abs() - other.jac_det.abs()).abs() < 1e-10 * d.jac_det.abs());
        assert!((d.k - other.k).abs() < 1e-10 * d.k);
        assert!((d.p - other.p).abs() < 1e-10 * d.p);
    }
}

#[test]
fn outer_dilatation_is_total() {
    // every matrix gets a value, including badly scaled ones
    for matrix in [
        vec![0.0; 9],
        vec![1e-300; 9],
        vec![1e300, 0.0, 0.0, 0.0, 1e-300, 0.0, 0.0, 0.0, 1.0],
    ] {
        let d = outer_dilatation(&matrix, 3);
        assert!(d.k >= 1.0 || d.k.is_infinite());
        assert!(d.p >= 1.0 || d.p.is_infinite());
    }
}

#[test]
fn periodic_overlap_bookkeeping() {
    // measure of {P = t₁} in [0, 1] equals λ exactly for every j
    for j in 1..=20 {
        let p = 2.0_f64.powi(-j);
        let lambda = 0.375;
        let m = periodic_overlap(0.0, 1.0, p, 0.0, lambda * p);
        assert!(
            (m - lambda).abs() < 1e-12,
            "j = {j}: overlap {m} vs {lambda}"
        );
    }
}
