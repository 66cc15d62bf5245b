//! The three-track, three-survey worked example and a hand-built ten-step
//! plan that meets every goal exactly.
#![allow(dead_code)]

use resourcetune::model::{Cell, InstanceMeta};
use resourcetune::{
    Emitter, Instance, MultipleInterval, SingleInterval, Survey, SurveyId, SystemSpec, Track,
    TrackId, TuningPlan,
};

pub fn si(lo: f64, hi: f64) -> SingleInterval {
    SingleInterval::new(lo, hi).unwrap()
}

pub fn mi(bands: &[(f64, f64)]) -> MultipleInterval {
    MultipleInterval::from_singles(bands.iter().map(|&(l, h)| si(l, h)).collect()).unwrap()
}

fn emitter(lo: f64, hi: f64, cap: f64) -> Emitter {
    Emitter::new(si(lo, hi), cap).unwrap()
}

pub fn worked_tracks() -> Vec<Track> {
    vec![
        Track::new(
            TrackId(1),
            vec![emitter(10970.0, 10990.0, 100.0), emitter(11840.0, 11900.0, 100.0)],
            0.3,
        )
        .unwrap(),
        Track::new(
            TrackId(2),
            vec![emitter(10545.0, 10600.0, 100.0), emitter(11005.0, 11050.0, 100.0)],
            0.5,
        )
        .unwrap(),
        Track::new(TrackId(3), vec![emitter(10200.0, 10230.0, 50.0)], 0.2).unwrap(),
    ]
}

pub fn worked_surveys() -> Vec<Survey> {
    vec![
        Survey::new(SurveyId(1), si(11350.0, 11900.0), 0.4).unwrap(),
        Survey::new(SurveyId(2), si(10900.0, 11250.0), 0.5).unwrap(),
        Survey::new(SurveyId(3), si(10100.0, 10750.0), 0.3).unwrap(),
    ]
}

pub fn worked_instance() -> Instance {
    Instance {
        spec: SystemSpec::standard(),
        tracks: worked_tracks(),
        surveys: worked_surveys(),
        meta: InstanceMeta::default(),
    }
}

/// Ten-step plan for the worked example. Every track and every survey
/// frequency is observed exactly as often as its goal demands.
pub fn worked_plan() -> TuningPlan {
    // observes the first emitter of track 1 and the second of track 2
    let a = mi(&[(10950.0, 11050.0), (11150.0, 11250.0)]);
    let e21 = mi(&[(10500.0, 10600.0), (10700.0, 10800.0)]);
    let e31 = mi(&[(10190.0, 10240.0)]);
    let p1 = mi(&[(11350.0, 11450.0), (11550.0, 11650.0)]);
    let p2 = mi(&[(11450.0, 11550.0), (11650.0, 11750.0)]);
    let p3 = mi(&[(11750.0, 11850.0)]);
    let p4 = mi(&[(11850.0, 11900.0)]);
    let q = mi(&[(10850.0, 10950.0), (11050.0, 11150.0)]);
    let r1 = mi(&[(10100.0, 10200.0), (10300.0, 10400.0)]);
    let r2 = mi(&[(10200.0, 10300.0), (10400.0, 10500.0)]);
    let r4 = mi(&[(10600.0, 10700.0)]);

    let mut plan = TuningPlan::for_spec(&SystemSpec::standard());
    let mut put = |node: usize, receiver: usize, step: usize, body: &MultipleInterval| {
        plan.set_cell(node, receiver, step, Cell { body: body.clone(), config: None })
            .unwrap();
    };
    for (step, shared) in [(0, &a), (1, &e31), (2, &e31), (3, &e21), (7, &e21), (8, &a), (9, &a)] {
        for node in 0..4 {
            put(node, 0, step, shared);
        }
    }
    for step in [0, 1, 7, 8] {
        put(0, 1, step, &p1);
        put(1, 1, step, &p2);
        put(2, 1, step, &p3);
    }
    for step in [2, 3] {
        put(0, 1, step, &r1);
        put(1, 1, step, &r2);
        put(2, 1, step, &p4);
        put(3, 1, step, &q);
    }
    put(0, 0, 4, &a);
    put(0, 1, 4, &r1);
    put(1, 0, 4, &r2);
    put(1, 1, 4, &r4);
    put(2, 0, 4, &q);
    put(2, 1, 4, &p4);

    put(0, 0, 5, &a);
    put(0, 1, 5, &e21);
    put(1, 0, 5, &r4);
    put(1, 1, 5, &q);
    put(2, 0, 5, &p4);

    put(0, 0, 6, &r4);
    put(1, 0, 6, &q);
    plan
}
