#![allow(clippy::excessive_precision)]

//! `log I_mu(z)` against 40-digit reference values (mpmath `besseli`).

use besq_core::{log_bessel_i, BesselOrder};

const REFERENCE: &[(f64, f64, f64)] = &[
    (0.0, 1e-3, 0.0000002499999843750017465192269),
    (0.0, 0.7, 0.1189406039106018499863781),
    (0.0, 5.0, 3.304681775822533433845831),
    (0.0, 29.9, 27.28638531055509431951361),
    (0.0, 30.1, 27.48302320895118323282),
    (0.0, 80.0, 76.89162054478559916303213),
    (0.0, 250.0, 246.320832012057087532835),
    (0.0, 499.0, 494.9750091714501957027067),
    (0.0, 501.0, 496.9730081667732304011129),
    (0.0, 700.0, 695.8056999984434490768029),
    (0.3, 1e-3, -2.172095736047079880668508),
    (0.3, 0.7, -0.114401010559111930345591),
    (0.3, 5.0, 3.294431945470595151534688),
    (0.3, 29.9, 27.28485417539312993102872),
    (0.3, 30.1, 27.48150242643389561061765),
    (0.3, 80.0, 76.89105448125035869946056),
    (0.3, 250.0, 246.320651650508783373887),
    (0.3, 499.0, 494.974918900534311589487),
    (0.3, 501.0, 496.972918256581109557335),
    (0.3, 700.0, 695.8056356667405555823774),
    (1.0, 1e-3, -7.600902334542084944821078),
    (1.0, 0.7, -0.9891849238651988406012494),
    (1.0, 5.0, 3.191942030545675463437139),
    (1.0, 29.9, 27.26937427307485665153784),
    (1.0, 30.1, 27.4661271685325805524131),
    (1.0, 80.0, 76.88533102688244901779402),
    (1.0, 250.0, 246.3188279973098207462627),
    (1.0, 499.0, 494.9740061615807110574118),
    (1.0, 501.0, 496.972009164941890488783),
    (1.0, 700.0, 695.8049852018556523307128),
    (2.5, 1e-3, -20.20322967977370921477432),
    (2.5, 0.7, -3.790663881861281021419254),
    (2.5, 5.0, 2.622265862896674934661661),
    (2.5, 29.9, 27.18012299909688465809333),
    (2.5, 30.1, 27.37747846820244064425084),
    (2.5, 80.0, 76.85231383107286637256531),
    (2.5, 250.0, 246.3083070084457706958597),
    (2.5, 499.0, 494.9687403708357438206998),
    (2.5, 501.0, 496.9667644162648756588374),
    (2.5, 700.0, 695.8012325237728241415026),
    (7.0, 1e-3, -61.73147854660999073900068),
    (7.0, 0.7, -15.85861673229030602796818),
    (7.0, 5.0, -1.360669727472670677857663),
    (7.0, 29.9, 26.4568421753793684163108),
    (7.0, 30.1, 26.65903390976893428588963),
    (7.0, 80.0, 76.5836325332245872245602),
    (7.0, 250.0, 246.2226416360358283437878),
    (7.0, 499.0, 494.9258624812894902458215),
    (7.0, 501.0, 496.9240578609986367848421),
    (7.0, 700.0, 695.7706752525764059110611),
    (20.0, 1e-3, -194.3536656396903699412095),
    (20.0, 0.7, -63.32622639049089056648724),
    (20.0, 5.0, -23.71416195199509141189417),
    (20.0, 29.9, 20.72371494219270070928554),
    (20.0, 30.1, 20.96178690431638822994738),
    (20.0, 80.0, 74.38904865610265027102528),
    (20.0, 250.0, 245.5196560407694281694959),
    (20.0, 499.0, 494.5738590415819091413863),
    (20.0, 501.0, 496.5734606091298140268263),
    (20.0, 700.0, 695.5198008297092311753658),
    (50.0, 1e-3, -528.5228899239751883161808),
    (50.0, 0.7, -200.9664712713944041222398),
    (50.0, 5.0, -102.5408253015129902917892),
    (50.0, 29.9, -9.026749857763761578883913),
    (50.0, 30.1, -8.63889077949568879878216),
    (50.0, 80.0, 61.64093943288454321898546),
    (50.0, 250.0, 241.3274556021404469782269),
    (50.0, 499.0, 492.4695858420605302072166),
    (50.0, 501.0, 494.4775798672722235953215),
    (50.0, 700.0, 694.0194695529353356704687),
];

#[test]
fn relative_error_below_1e10_across_both_branches() {
    let mut worst: f64 = 0.0;
    for &(mu, z, log_ref) in REFERENCE {
        let v = log_bessel_i(BesselOrder::new(mu).unwrap(), z).unwrap();
        let rel = (v - log_ref).exp_m1().abs();
        worst = worst.max(rel);
        assert!(rel <= 1e-10, "mu={mu} z={z}: {v} vs {log_ref} (rel {rel:e})");
    }
    assert!(worst < 1e-10);
}
