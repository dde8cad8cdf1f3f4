//! Cross-validation of the independent density code paths on
//! randomized shapes: the general zonal series against the closed
//! Kotz displays, quadrature against closed radial integrals, and the
//! generator-free central value.

use nalgebra::DMatrix;
use pwshape::density::{
    central_invariant_logdensity, CovSpec, DensityContext, GeneratorFamily, ModelSpec,
    RadialConvention,
};
use pwshape::geometry::{preshape, pw_coordinates, PseudoWishartShape, VStarMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// |Δ log f| bound for agreement between two closed-form paths.
const CLOSED_FORM_TOL: f64 = 1e-9;
/// |Δ log f| bound for quadrature against closed forms.
const QUADRATURE_TOL: f64 = 1e-8;
/// |Δ log f| bound for the isotropic shortcut against the general
/// covariance path at `Sigma = sigma^2 I`.
const ISOTROPIC_TOL: f64 = 1e-12;

fn random_shape(rng: &mut impl Rng, q: usize, k: usize) -> PseudoWishartShape {
    loop {
        let config = DMatrix::from_fn(q + 1, k, |_, _| rng.gen_range(-3.0..3.0));
        let y = preshape(&config);
        if let Ok(shape) = pw_coordinates(&y) {
            return shape;
        }
    }
}

fn small_mu() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        5,
        2,
        &[0.8, -0.3, 0.2, 0.9, -0.5, 0.4, 0.7, 0.1, -0.2, -0.6],
    )
}

fn base_model(generator: GeneratorFamily) -> ModelSpec {
    ModelSpec::new(generator, small_mu(), CovSpec::Isotropic(2.0)).with_truncation(48)
}

#[test]
fn gaussian_series_and_display_agree_on_random_shapes() {
    let mut rng = ChaCha20Rng::seed_from_u64(42);
    for convention in [RadialConvention::Printed, RadialConvention::Derived] {
        let ctx = DensityContext::new(
            base_model(GeneratorFamily::Gaussian).with_convention(convention),
        )
        .unwrap();
        for _ in 0..10 {
            let shape = random_shape(&mut rng, 5, 2);
            let series = ctx.shape_logdensity(&shape).unwrap();
            let display = ctx.kotz_t1_shape_logdensity(&shape).unwrap();
            assert!(
                (series.log_density - display.log_density).abs() < CLOSED_FORM_TOL,
                "series {} vs display {} ({convention:?})",
                series.log_density,
                display.log_density
            );
        }
    }
}

#[test]
fn kotz_displays_agree_with_the_series_on_random_shapes() {
    let mut rng = ChaCha20Rng::seed_from_u64(43);
    for t_param in [2.0, 3.0] {
        let ctx = DensityContext::new(base_model(GeneratorFamily::Kotz {
            t: t_param,
            r: 0.5,
        }))
        .unwrap();
        for _ in 0..10 {
            let shape = random_shape(&mut rng, 5, 2);
            let series = ctx.shape_logdensity(&shape).unwrap();
            let coefficient = ctx.kotz_general_shape_logdensity(&shape).unwrap();
            let display = if t_param == 2.0 {
                ctx.kotz_t2_shape_logdensity(&shape).unwrap()
            } else {
                ctx.kotz_t3_shape_logdensity(&shape).unwrap()
            };
            assert!(
                (series.log_density - coefficient.log_density).abs() < CLOSED_FORM_TOL,
                "series {} vs coefficient form {}",
                series.log_density,
                coefficient.log_density
            );
            assert!(
                (series.log_density - display.log_density).abs() < CLOSED_FORM_TOL,
                "series {} vs display {}",
                series.log_density,
                display.log_density
            );
        }
    }
}

#[test]
fn quadrature_radial_weights_match_closed_forms() {
    let mut rng = ChaCha20Rng::seed_from_u64(44);
    for t_param in [1.0, 2.0, 3.0] {
        let closed = DensityContext::new(base_model(GeneratorFamily::Kotz {
            t: t_param,
            r: 0.5,
        }))
        .unwrap();
        let quad = DensityContext::new(
            base_model(GeneratorFamily::Kotz { t: t_param, r: 0.5 }).with_radial_quadrature(true),
        )
        .unwrap();
        for _ in 0..6 {
            let shape = random_shape(&mut rng, 5, 2);
            let a = closed.shape_logdensity(&shape).unwrap();
            let b = quad.shape_logdensity(&shape).unwrap();
            assert!(
                (a.log_density - b.log_density).abs() < QUADRATURE_TOL,
                "T={t_param}: closed {} vs quadrature {}",
                a.log_density,
                b.log_density
            );
        }
    }
}

#[test]
fn isotropic_shortcut_equals_general_covariance() {
    let mut rng = ChaCha20Rng::seed_from_u64(45);
    let s2 = 2.0;
    let iso = DensityContext::new(base_model(GeneratorFamily::Gaussian)).unwrap();
    let gen_cov = DensityContext::new(
        ModelSpec::new(
            GeneratorFamily::Gaussian,
            small_mu(),
            CovSpec::General(DMatrix::identity(5, 5) * s2),
        )
        .with_truncation(48),
    )
    .unwrap();
    for _ in 0..8 {
        let shape = random_shape(&mut rng, 5, 2);
        let a = iso.shape_logdensity(&shape).unwrap();
        let b = gen_cov.shape_logdensity(&shape).unwrap();
        assert!(
            (a.log_density - b.log_density).abs() < ISOTROPIC_TOL,
            "isotropic {} vs general {}",
            a.log_density,
            b.log_density
        );
    }
}

#[test]
fn central_density_is_the_same_for_every_generator_under_derived() {
    let mut rng = ChaCha20Rng::seed_from_u64(46);
    let central_mu = DMatrix::zeros(5, 2);
    let cov = CovSpec::Isotropic(2.0);
    let contexts: Vec<DensityContext> = [
        GeneratorFamily::Gaussian,
        GeneratorFamily::Kotz { t: 2.0, r: 0.5 },
        GeneratorFamily::Kotz { t: 3.0, r: 0.25 },
    ]
    .into_iter()
    .map(|g| {
        DensityContext::new(
            ModelSpec::new(g, central_mu.clone(), cov.clone())
                .with_truncation(16)
                .with_convention(RadialConvention::Derived),
        )
        .unwrap()
    })
    .collect();
    for _ in 0..8 {
        let shape = random_shape(&mut rng, 5, 2);
        let invariant = central_invariant_logdensity(
            &shape,
            &cov,
            RadialConvention::Derived,
            VStarMode::Cholesky,
        )
        .unwrap();
        for ctx in &contexts {
            let d = ctx.shape_logdensity(&shape).unwrap();
            assert!(
                (d.log_density - invariant).abs() < QUADRATURE_TOL,
                "generator value {} vs invariant {}",
                d.log_density,
                invariant
            );
        }
    }
}

#[test]
fn anisotropic_row_covariance_changes_the_density() {
    // A directional covariance must actually matter: compare the
    // isotropic model with a stretched one at the same total variance.
    let mut rng = ChaCha20Rng::seed_from_u64(47);
    let mut sigma = DMatrix::identity(5, 5) * 2.0;
    sigma[(0, 0)] = 5.0;
    sigma[(4, 4)] = 0.5;
    let iso = DensityContext::new(base_model(GeneratorFamily::Gaussian)).unwrap();
    let aniso = DensityContext::new(
        ModelSpec::new(GeneratorFamily::Gaussian, small_mu(), CovSpec::General(sigma))
            .with_truncation(48),
    )
    .unwrap();
    let shape = random_shape(&mut rng, 5, 2);
    let a = iso.shape_logdensity(&shape).unwrap();
    let b = aniso.shape_logdensity(&shape).unwrap();
    assert!((a.log_density - b.log_density).abs() > 1e-3);
}
