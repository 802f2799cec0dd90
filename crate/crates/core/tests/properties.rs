mod common;

use pavecrack::eval::{directed_hausdorff, hausdorff, sm_score, PixelSet};
use pavecrack::morphology::{
    bottom_hat, gray_close, gray_dilate, gray_erode, gray_open, StructuringElement,
};
use pavecrack::raster::pgm::{decode, encode};
use pavecrack::raster::invert;
use pavecrack::threshold::{singh_threshold, SinghParams};
use pavecrack::voting::{eigen_decompose, SymTensor2};
use pavecrack::{BinaryMask, GrayImage, IntegralImage, PipelineConfig, PixelCoord};
use proptest::prelude::*;

fn image(max_side: usize) -> impl Strategy<Value = GrayImage> {
    (1..=max_side, 1..=max_side).prop_flat_map(|(w, h)| {
        prop::collection::vec(any::<u8>(), w * h)
            .prop_map(move |levels| GrayImage::from_levels(w, h, &levels).unwrap())
    })
}

fn element() -> impl Strategy<Value = StructuringElement> {
    prop_oneof![
        (0usize..3).prop_map(|h| StructuringElement::square(2 * h + 1).unwrap()),
        (0usize..4).prop_map(StructuringElement::disk),
    ]
}

fn points(max: usize) -> impl Strategy<Value = PixelSet> {
    prop::collection::vec((0usize..40, 0usize..40), 1..=max)
        .prop_map(|v| PixelSet::new(v.into_iter().map(|(x, y)| PixelCoord::new(x, y))))
}

fn le(a: &GrayImage, b: &GrayImage) -> bool {
    a.pixels().iter().zip(b.pixels()).all(|(x, y)| x <= y)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integral_sums_monotone(img in image(24)) {
        let ii = IntegralImage::new(&img);
        for y in 0..img.height() {
            for x in 0..img.width() {
                if x > 0 { prop_assert!(ii.sum_to(x, y) >= ii.sum_to(x - 1, y)); }
                if y > 0 { prop_assert!(ii.sum_to(x, y) >= ii.sum_to(x, y - 1)); }
            }
        }
        let (w, h) = (img.width(), img.height());
        prop_assert_eq!(ii.sum_to(w - 1, h - 1), common::brute_rect_sum(&img, 0, 0, w - 1, h - 1));
    }

    #[test]
    fn singh_foreground_monotone_in_k(img in image(32), w in (1usize..8).prop_map(|h| 2 * h + 1)) {
        let masks: Vec<BinaryMask> = [0.01, 0.06, 0.1]
            .iter()
            .map(|&k| singh_threshold(&img, &SinghParams::new(k, w).unwrap()).unwrap())
            .collect();
        for pair in masks.windows(2) {
            prop_assert!(pair[0].bits().iter().zip(pair[1].bits()).all(|(a, b)| !a || *b));
        }
    }

    #[test]
    fn singh_monotone_for_any_k_pair(img in image(20), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let m = |k| singh_threshold(&img, &SinghParams::new(k, 7).unwrap()).unwrap();
        let (small, large) = (m(lo), m(hi));
        prop_assert!(small.bits().iter().zip(large.bits()).all(|(s, l)| !s || *l));
    }

    #[test]
    fn morphology_ordering_chain(img in image(20), b in element()) {
        let (e, o, c, d) = (gray_erode(&img, &b), gray_open(&img, &b), gray_close(&img, &b), gray_dilate(&img, &b));
        prop_assert!(le(&e, &o) && le(&o, &img) && le(&img, &c) && le(&c, &d));
    }

    #[test]
    fn morphology_duality(img in image(20), b in element()) {
        let inv = invert(&img);
        prop_assert!(common::max_abs_diff(&gray_erode(&img, &b), &invert(&gray_dilate(&inv, &b))) < 1e-12);
        prop_assert!(common::max_abs_diff(&gray_open(&img, &b), &invert(&gray_close(&inv, &b))) < 1e-12);
    }

    #[test]
    fn open_close_idempotent(img in image(20), b in element()) {
        let o = gray_open(&img, &b);
        let c = gray_close(&img, &b);
        prop_assert_eq!(gray_open(&o, &b), o);
        prop_assert_eq!(gray_close(&c, &b), c);
    }

    #[test]
    fn bottom_hat_non_negative(img in image(20), b in element()) {
        prop_assert!(bottom_hat(&img, &b).pixels().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn hausdorff_symmetric(a in points(30), b in points(30)) {
        let h = hausdorff(&a, &b).unwrap();
        prop_assert_eq!(h, hausdorff(&b, &a).unwrap());
        let ab = directed_hausdorff(&a, &b).unwrap();
        let ba = directed_hausdorff(&b, &a).unwrap();
        prop_assert_eq!(h, ab.max(ba));
        prop_assert_eq!(directed_hausdorff(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn sm_bounded_and_monotone_in_tau(a in points(30), b in points(30), t in 0.0f64..10.0, dt in 0.0f64..10.0) {
        let lo = sm_score(&a, &b, t).unwrap();
        let hi = sm_score(&a, &b, t + dt).unwrap();
        prop_assert!((0.0..=100.0).contains(&lo) && (0.0..=100.0).contains(&hi));
        prop_assert!(lo <= hi);
        prop_assert_eq!(lo, sm_score(&b, &a, t).unwrap());
        prop_assert_eq!(sm_score(&a, &a, t).unwrap(), 100.0);
    }

    #[test]
    fn eigen_reconstruction(a in -10.0f64..10.0, b in -10.0f64..10.0, c in -10.0f64..10.0, d in -10.0f64..10.0) {
        let t = SymTensor2::outer([a, b]) + SymTensor2::outer([c, d]);
        let e = eigen_decompose(&t);
        prop_assert!(e.l1 >= e.l2 && e.l2 >= -1e-9);
        prop_assert!(SymTensor2::from_eigen(&e).max_abs_diff(&t) <= 1e-9 * (1.0 + t.trace()));
        let dot = e.e1[0] * e.e2[0] + e.e1[1] * e.e2[1];
        prop_assert!(dot.abs() < 1e-9);
    }

    #[test]
    fn pgm_round_trip(img in image(32)) {
        let back = decode(&encode(&img)).unwrap();
        prop_assert_eq!(back.to_levels(), img.to_levels());
        prop_assert_eq!((back.width(), back.height()), (img.width(), img.height()));
    }

    #[test]
    fn config_round_trip(k in 0.0f64..=1.0, hw in 1usize..60, sigma in 1.0f64..8.0) {
        let mut cfg = PipelineConfig::default();
        cfg.singh_k = k;
        cfg.singh_w = 2 * hw + 1;
        cfg.sigma_ball = sigma;
        let text = cfg.to_toml_string();
        prop_assert_eq!(PipelineConfig::from_toml_str(&text).unwrap(), cfg);
    }
}
