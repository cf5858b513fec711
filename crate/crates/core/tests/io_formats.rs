use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use epipolicy::estimation::{DailyRecord, RealDataSeries, SeriesError};
use epipolicy::io::{
    load_case_csv, load_region_config, read_band, read_trajectories, write_band, write_case_csv, write_trajectories,
    IoError, TrajectoryRecord,
};
use epipolicy::sensitivity::Band;
use epipolicy::Action;
use proptest::prelude::*;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 5, 1).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn case_rows(n: usize, break_deaths_at: Option<usize>) -> String {
    let mut text = String::from("date,new_cases,active_cases,cumulative_deaths,cumulative_recoveries\n");
    for k in 0..n {
        let date = start() + chrono::Days::new(k as u64);
        let row = k + 1;
        let deaths = if Some(row) == break_deaths_at { 0 } else { 10 + row };
        text.push_str(&format!("{date},{},{},{deaths},{}\n", 5 * row, 100 + row, 3 * row));
    }
    text
}

#[test]
fn forty_row_file_loads() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "c.csv", &case_rows(40, None));
    let s = load_case_csv(&p).unwrap();
    assert_eq!(s.len(), 40);
    assert_eq!(s.day(40).cumulative_deaths, 50);
    assert!(s.has_recoveries());
}

#[test]
fn decreasing_deaths_names_the_row() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "c.csv", &case_rows(10, Some(7)));
    match load_case_csv(&p) {
        Err(IoError::Series { source: SeriesError::DecreasingDeaths { row, .. }, .. }) => assert_eq!(row, 7),
        other => panic!("unexpected {other:?}"),
    }
    let msg = load_case_csv(&p).unwrap_err().to_string();
    assert!(msg.contains("row 7"), "{msg}");
}

#[test]
fn each_malformation_has_its_own_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = write(dir.path(), "m.csv", "date,new_cases,cumulative_deaths\n2020-05-01,1,1\n");
    assert!(matches!(load_case_csv(&missing), Err(IoError::MissingColumn { column: "active_cases", .. })));

    let gap = write(
        dir.path(),
        "g.csv",
        "date,new_cases,active_cases,cumulative_deaths\n2020-05-01,1,1,1\n2020-05-03,1,1,1\n",
    );
    assert!(matches!(
        load_case_csv(&gap),
        Err(IoError::Series { source: SeriesError::NonContiguousDate { row: 2, .. }, .. })
    ));

    let negative = write(
        dir.path(),
        "n.csv",
        "date,new_cases,active_cases,cumulative_deaths\n2020-05-01,1,1,1\n2020-05-02,1,-4,1\n",
    );
    assert!(matches!(
        load_case_csv(&negative),
        Err(IoError::NegativeCount { row: 2, column: "active_cases", value: -4, .. })
    ));

    let garbage = write(dir.path(), "p.csv", "date,new_cases,active_cases,cumulative_deaths\n2020-05-01,x,1,1\n");
    assert!(matches!(load_case_csv(&garbage), Err(IoError::Parse { row: 1, .. })));

    let absent = dir.path().join("absent.csv");
    let err = load_case_csv(&absent).unwrap_err();
    assert!(err.is_io());
    assert!(err.to_string().contains("absent.csv"));
}

#[test]
fn recoveries_column_is_optional() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "r.csv",
        "date,new_cases,active_cases,cumulative_deaths\n2020-05-01,1,1,1\n2020-05-02,2,2,2\n",
    );
    let s = load_case_csv(&p).unwrap();
    assert!(!s.has_recoveries());
    assert_eq!(s.day(2).new_cases, 2);
}

fn series_strategy() -> impl Strategy<Value = RealDataSeries> {
    prop::collection::vec((0u64..10_000, 0u64..100_000, 0u64..50, prop::option::of(0u64..1_000)), 1..60).prop_map(
        |rows| {
            let mut deaths = 0;
            let mut rec = 0;
            let with_rec = rows[0].3.is_some();
            let records = rows
                .iter()
                .enumerate()
                .map(|(k, &(new, active, dd, dr))| {
                    deaths += dd;
                    rec += dr.unwrap_or(0);
                    DailyRecord {
                        date: start() + chrono::Days::new(k as u64),
                        new_cases: new,
                        active_cases: active,
                        cumulative_deaths: deaths,
                        cumulative_recoveries: with_rec.then_some(rec),
                    }
                })
                .collect();
            RealDataSeries::new(records).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn case_csv_round_trip(series in series_strategy()) {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        write_case_csv(&p, &series).unwrap();
        prop_assert_eq!(load_case_csv(&p).unwrap(), series);
    }

    #[test]
    fn trajectory_round_trip(rows in prop::collection::vec((0u32..5, prop::array::uniform10(0u64..u64::MAX / 16), 0u8..3), 0..40)) {
        let records: Vec<TrajectoryRecord> = rows
            .iter()
            .enumerate()
            .map(|(k, (rep, v, a))| TrajectoryRecord {
                replicate: *rep,
                day: k as u32 + 1,
                date: start() + chrono::Days::new(k as u64),
                action: Action::from_level(*a).unwrap(),
                s: v[0], l: v[1], i_m: v[2], i_s: v[3], r: v[4], d: v[5],
                i_m_o: v[6], i_s_o: v[7], r_o: v[8], d_o: v[9],
            })
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        write_trajectories(&p, &records).unwrap();
        prop_assert_eq!(read_trajectories(&p).unwrap(), records);
    }
}

#[test]
fn empty_trajectories_write_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.csv");
    write_trajectories(&p, &[]).unwrap();
    assert_eq!(
        std::fs::read_to_string(&p).unwrap(),
        "replicate,day,date,action,s,l,i_m,i_s,r,d,i_m_o,i_s_o,r_o,d_o\n"
    );
}

#[test]
fn band_writes_are_byte_identical_and_six_digit() {
    let band = Band {
        lower: vec![1.0 / 3.0, 10.0],
        mean: vec![2.0 / 3.0, 123_456.789],
        upper: vec![1.0, 2.5e7],
        curves: vec![],
    };
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    write_band(&a, &[40, 41], &band, start()).unwrap();
    write_band(&b, &[40, 41], &band, start()).unwrap();
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    assert_eq!(
        String::from_utf8(text).unwrap(),
        "day,date,lower,mean,upper\n40,2020-06-09,0.333333,0.666667,1\n41,2020-06-10,10,123457,2.5e7\n"
    );
    let rows = read_band(&a).unwrap();
    assert_eq!(rows[1].upper, 2.5e7);
}

#[test]
fn fixtures_reproduce_cost_and_capacity_table() {
    let expected = [
        ("az", 341_800_000u64, 6537u64, 1u8, 0.07),
        ("ca", 2_928_000_000, 34242, 1, 0.07),
        ("fl", 978_600_000, 24208, 0, 0.07),
        ("mi", 484_700_000, 11320, 2, 0.07),
        ("nj", 577_100_000, 10398, 2, 0.15),
        ("tx", 1_761_000_000, 30784, 1, 0.07),
    ];
    for (name, c_e, cap, action, p_s) in expected {
        let c = load_region_config(&fixture(&format!("regions/{name}.json"))).unwrap();
        assert_eq!(c.name, name.to_uppercase());
        assert_eq!(c.c_e, c_e, "{name}");
        assert_eq!(c.cap, cap, "{name}");
        assert_eq!(c.training_action.level(), action, "{name}");
        assert_eq!(c.p_severe, p_s, "{name}");
        assert_eq!(c.c_l, 4_700_000);
        assert_eq!(c.rho, 0.25);
        assert_eq!(c.inflation, 10.0);
        assert_eq!((c.training_days, c.horizon_days), (40, 90));
        let cost = c.cost_config().unwrap();
        assert_eq!(cost.c_e, c_e as f64);
    }
}

#[test]
fn region_config_is_strict() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("regions/mi.json")).unwrap();
    let unknown = text.replacen("\"rho\"", "\"rhoo\"", 1);
    let p = write(dir.path(), "u.json", &unknown);
    assert!(matches!(load_region_config(&p), Err(IoError::Config { .. })));

    let inverted = text.replacen("\"horizon_days\": 90", "\"horizon_days\": 40", 1);
    let p = write(dir.path(), "h.json", &inverted);
    let err = load_region_config(&p).unwrap_err().to_string();
    assert!(err.contains("horizon_days"), "{err}");

    let bad_action = text.replacen("\"training_action\": 2", "\"training_action\": 3", 1);
    let p = write(dir.path(), "a.json", &bad_action);
    assert!(load_region_config(&p).is_err());
}

#[test]
fn bundled_case_series_is_valid() {
    let s = load_case_csv(&fixture("data/mi_like_cases.csv")).unwrap();
    assert_eq!(s.len(), 40);
    assert_eq!(s.start_date(), start());
}
