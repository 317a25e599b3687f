use std::collections::HashSet;
use std::sync::Arc;

use predict_core::concepts::{vc_dimension, ConceptClass, EnumeratedClass, Hypothesis, VersionSpace};
use predict_core::domain::{
    draw_sample, empirical_error, partition, DataDistribution, Label, LabeledSample, NoiseSource, Point, Sampler,
};
use proptest::prelude::*;

fn p(x: f64) -> Point {
    Point::scalar(x)
}

fn thresholds(domain: u64) -> ConceptClass {
    ConceptClass::Thresholds { domain }
}

fn random_class(noise: &mut NoiseSource, points: usize, rows: usize) -> EnumeratedClass {
    let pts = (1..=points).map(|i| p(i as f64)).collect();
    let patterns = (0..rows).map(|_| (0..points).map(|_| Label::from_bool(noise.coin())).collect()).collect();
    EnumeratedClass::new(pts, patterns).unwrap()
}

#[test]
fn draw_sample_examples() {
    let x0 = p(4.0);
    let dist = DataDistribution::new(Sampler::point_mass(x0.clone()), Hypothesis::Threshold(1)).unwrap();
    let s = draw_sample(&dist, 3, &mut NoiseSource::seeded(1)).unwrap();
    assert!(s.iter().all(|r| *r == (x0.clone(), Label::Positive)));
    assert_eq!(s.len(), 3);
    assert!(draw_sample(&dist, 0, &mut NoiseSource::seeded(1)).is_err());

    let grid = DataDistribution::new(Sampler::Grid { size: 100 }, Hypothesis::Threshold(50)).unwrap();
    let s = draw_sample(&grid, 10_000, &mut NoiseSource::seeded(2)).unwrap();
    let frac = s.iter().filter(|r| r.1 == Label::Positive).count() as f64 / 1e4;
    // Binomial(1e4, 0.51) has standard deviation 0.005.
    assert!((frac - 0.51).abs() <= 0.02, "positive fraction {frac}");
}

#[test]
fn partition_examples() {
    let s = LabeledSample::new((1..=4).map(|i| (p(i as f64), Label::Positive)).collect()).unwrap();
    let blocks = partition(&s, 2, &mut NoiseSource::seeded(3)).unwrap();
    assert_eq!(blocks.len(), 2);
    let mut all: Vec<f64> = blocks.iter().flat_map(|b| b.iter().map(|r| r.0.x0())).collect();
    all.sort_by(f64::total_cmp);
    assert_eq!(all, vec![1.0, 2.0, 3.0, 4.0]);
    assert!(blocks.iter().all(|b| b.len() == 2));
    assert_eq!(partition(&s, 1, &mut NoiseSource::seeded(3)).unwrap()[0].len(), 4);
    let five = LabeledSample::new((1..=5).map(|i| (p(i as f64), Label::Positive)).collect()).unwrap();
    assert!(partition(&five, 2, &mut NoiseSource::seeded(3)).is_err());
}

#[test]
fn empirical_error_examples() {
    let target = Hypothesis::Threshold(5);
    let s = LabeledSample::new((1..=10).map(|i| (p(i as f64), target.evaluate(&p(i as f64)).unwrap())).collect())
        .unwrap();
    assert_eq!(empirical_error(&target, &s).unwrap(), 0.0);
    let flipped = LabeledSample::new(s.iter().map(|(x, y)| (x.clone(), y.flip())).collect()).unwrap();
    assert_eq!(empirical_error(&target, &flipped).unwrap(), 1.0);
    for t in 0..=12 {
        let h = Hypothesis::Threshold(t);
        let brute = (1..=10).filter(|&i| (i >= t) != (i >= 5)).count() as f64 / 10.0;
        assert_eq!(empirical_error(&h, &s).unwrap(), brute);
    }
}

#[test]
fn evaluate_examples() {
    assert_eq!(Hypothesis::Threshold(5).evaluate(&p(7.0)).unwrap(), Label::Positive);
    let x = Point::new(vec![-3.0, 9.0]).unwrap();
    assert_eq!(Hypothesis::Halfspace(vec![1.0, 0.0, 0.0]).evaluate(&x).unwrap(), Label::Negative);
    assert_eq!(Hypothesis::Halfspace(vec![0.0, 0.0, 0.0]).evaluate(&x).unwrap(), Label::Positive);
}

#[test]
fn restrict_examples() {
    let v = VersionSpace::new(thresholds(10)).restrict(&p(5.0), Label::Positive);
    let (lo, hi) = v.threshold_interval().unwrap();
    assert_eq!((lo, hi), (1, 5));
    assert!(v.restrict(&p(5.0), Label::Negative).is_empty().unwrap());

    let all = Arc::new(EnumeratedClass::all_functions(3));
    let v = VersionSpace::new(ConceptClass::Enumerated(all.clone())).restrict(&p(2.0), Label::Negative);
    let brute = (0..all.len()).filter(|&r| all.patterns[r][1] == Label::Negative).count();
    assert_eq!(v.enumerated_members().unwrap().len(), brute);
    assert_eq!(brute, 4);
}

#[test]
fn erm_examples() {
    let target = Hypothesis::Threshold(3);
    let s = LabeledSample::new((1..=10).map(|i| (p(i as f64), target.evaluate(&p(i as f64)).unwrap())).collect())
        .unwrap();
    let h = VersionSpace::new(thresholds(10)).erm(&s).unwrap();
    assert_eq!(empirical_error(&h, &s).unwrap(), 0.0);

    // Negative label at 7 forces t >= 8.
    let v = VersionSpace::new(thresholds(10)).restrict(&p(7.0), Label::Negative);
    let h = v.erm(&s).unwrap();
    let best = (8..=11).map(|t| empirical_error(&Hypothesis::Threshold(t), &s).unwrap()).fold(f64::INFINITY, f64::min);
    assert_eq!(h, Hypothesis::Threshold(8));
    assert_eq!(empirical_error(&h, &s).unwrap(), best);
    assert_eq!(best, 0.5);

    let one = Arc::new(EnumeratedClass::new(vec![p(1.0), p(2.0)], vec![vec![Label::Positive, Label::Negative]]).unwrap());
    let v = VersionSpace::new(ConceptClass::Enumerated(one.clone()));
    let h = v.erm(&LabeledSample::new(vec![(p(2.0), Label::Positive)]).unwrap()).unwrap();
    assert_eq!(h, Hypothesis::Enumerated { class: one, row: 0 });
}

#[test]
fn pattern_count_examples() {
    let queries: Vec<Point> = [2.0, 4.0, 7.0, 9.0].iter().map(|x| p(*x)).collect();
    assert_eq!(VersionSpace::new(thresholds(10)).pattern_count(&queries).unwrap(), 5);
    let all = Arc::new(EnumeratedClass::all_functions(3));
    let q3: Vec<Point> = (1..=3).map(|i| p(i as f64)).collect();
    assert_eq!(VersionSpace::new(ConceptClass::Enumerated(all)).pattern_count(&q3).unwrap(), 8);

    let mut noise = NoiseSource::seeded(12);
    for _ in 0..20 {
        let c = Arc::new(random_class(&mut noise, 8, 12));
        let q: Vec<usize> = (0..5).map(|_| noise.index(8)).collect();
        let qp: Vec<Point> = q.iter().map(|&i| c.points[i].clone()).collect();
        let brute: HashSet<Vec<Label>> = c.patterns.iter().map(|row| q.iter().map(|&i| row[i]).collect()).collect();
        assert_eq!(VersionSpace::new(ConceptClass::Enumerated(c)).pattern_count(&qp).unwrap(), brute.len() as u64);
    }
}

/// Largest subset size shattered, by exhaustive search over all subsets.
fn brute_vc(c: &EnumeratedClass) -> usize {
    let n = c.points.len();
    let mut best = 0;
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let seen: HashSet<Vec<Label>> = c.patterns.iter().map(|r| idx.iter().map(|&i| r[i]).collect()).collect();
        if seen.len() == 1 << idx.len() {
            best = best.max(idx.len());
        }
    }
    best
}

#[test]
fn vc_dimension_examples() {
    assert_eq!(vc_dimension(&thresholds(100)), 1);
    assert_eq!(vc_dimension(&ConceptClass::Enumerated(Arc::new(EnumeratedClass::all_functions(3)))), 3);
    let mut noise = NoiseSource::seeded(99);
    for _ in 0..20 {
        let c = random_class(&mut noise, 6, 10);
        assert_eq!(vc_dimension(&ConceptClass::Enumerated(Arc::new(c.clone()))), brute_vc(&c));
    }
}

proptest! {
    #[test]
    fn threshold_erm_is_optimal_within_version_space(
        seed in any::<u64>(),
        hard in proptest::collection::vec((1i64..=20, any::<bool>()), 0..4),
    ) {
        let mut noise = NoiseSource::seeded(seed);
        let target = Hypothesis::Threshold(1 + noise.index(21) as i64);
        let dist = DataDistribution::new(Sampler::Grid { size: 20 }, target).unwrap();
        let s = draw_sample(&dist, 15, &mut noise).unwrap();
        let mut v = VersionSpace::new(thresholds(20));
        for (x, lab) in hard {
            v = v.restrict(&p(x as f64), Label::from_bool(lab));
        }
        let members: Vec<i64> = (1..=21).filter(|&t| v.contains(&Hypothesis::Threshold(t)).unwrap()).collect();
        match v.erm(&s) {
            Ok(h) => {
                prop_assert!(v.contains(&h).unwrap());
                let best = members.iter().map(|&t| empirical_error(&Hypothesis::Threshold(t), &s).unwrap()).fold(f64::INFINITY, f64::min);
                prop_assert_eq!(empirical_error(&h, &s).unwrap(), best);
            }
            Err(_) => prop_assert!(members.is_empty()),
        }
    }

    #[test]
    fn restriction_never_grows_pattern_count(seed in any::<u64>(), x in 1i64..=30, lab in any::<bool>()) {
        let mut noise = NoiseSource::seeded(seed);
        let queries: Vec<Point> = (0..12).map(|_| p(1.0 + noise.index(30) as f64)).collect();
        let v = VersionSpace::new(thresholds(30));
        let r = v.restrict(&p(x as f64), Label::from_bool(lab));
        prop_assert!(r.pattern_count(&queries).unwrap() <= v.pattern_count(&queries).unwrap());
        let c = Arc::new(random_class(&mut noise, 6, 16));
        let e = VersionSpace::new(ConceptClass::Enumerated(c.clone()));
        let q: Vec<Point> = c.points.clone();
        let er = e.restrict(&c.points[(x as usize) % 6], Label::from_bool(lab));
        prop_assert!(er.pattern_count(&q).unwrap() <= e.pattern_count(&q).unwrap());
    }

    #[test]
    fn partition_preserves_records(seed in any::<u64>(), k in 1usize..=6, m in 1usize..=5) {
        let s = LabeledSample::new((0..k * m).map(|i| (p(i as f64), Label::from_bool(i % 3 == 0))).collect()).unwrap();
        let blocks = partition(&s, k, &mut NoiseSource::seeded(seed)).unwrap();
        let mut seen: Vec<f64> = blocks.iter().flat_map(|b| b.iter().map(|r| r.0.x0())).collect();
        seen.sort_by(f64::total_cmp);
        prop_assert_eq!(seen, (0..k * m).map(|i| i as f64).collect::<Vec<_>>());
        prop_assert!(blocks.iter().all(|b| b.len() == m));
    }
}
