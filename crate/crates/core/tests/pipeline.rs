//! End-to-end runs of the empirical pipeline on synthetic instruments whose
//! dependence structure is known.

use depinfer::dgp::{simulate_ar_arch, DgpSpec, InnovationDist};
use depinfer::empirical::{run_empirical, EmpiricalConfig};
use depinfer::io::{read_returns, synthetic_dates, write_returns, IngestMode, Instrument};

fn instrument(name: &str, spec: DgpSpec) -> Instrument {
    let returns = simulate_ar_arch(&spec).unwrap();
    Instrument {
        name: name.into(),
        dates: synthetic_dates(returns.len()),
        returns,
    }
}

fn spec(phi: f64, alpha: f64, beta: f64, seed: u64) -> DgpSpec {
    DgpSpec {
        phi,
        omega: 0.05,
        alpha,
        beta,
        innovation: InnovationDist::StandardNormal,
        len: 4000,
        burn_in: 1000,
        seed,
    }
}

#[test]
fn known_structure_is_recovered() {
    let insts = vec![
        instrument("white", spec(0.0, 0.0, 0.0, 1)),
        instrument("ar", spec(0.3, 0.0, 0.0, 2)),
        instrument("garch", spec(0.0, 0.1, 0.85, 3)),
    ];
    let report = run_empirical(&insts, &EmpiricalConfig::default()).unwrap();
    let get = |n: &str| report.instruments.iter().find(|r| r.name == n).unwrap().analysis.as_ref().unwrap();

    // Gaussian white noise: thin tails, so the largest signed power is chosen
    // and nothing is found.
    let white = get("white");
    assert_eq!(white.selected_s, Some(0.5));
    assert!(!white.linear.hac.as_ref().unwrap().reject);
    assert!(white.clustering.iter().all(|c| c.estimate.abs() < 0.06));

    // AR(1) with φ = 0.3: the lag-one correlation is 0.3 and both tests see it.
    let ar = get("ar");
    assert!((ar.linear.estimate - 0.3).abs() < 0.06, "{}", ar.linear.estimate);
    assert!(ar.linear.hac.as_ref().unwrap().reject);
    assert!(ar.linear.group.as_ref().unwrap().reject);
    assert_eq!(ar.linear.group.as_ref().unwrap().stars, "***");

    // GARCH: no linear dependence but clear volatility clustering at lag 5.
    let g = get("garch");
    assert!(!g.linear.group.as_ref().unwrap().reject);
    let c = g.clustering.iter().find(|c| c.power == 1.0).unwrap();
    assert!(c.estimate > 0.05, "{}", c.estimate);
    assert!(c.hac.as_ref().unwrap().reject);
}

#[test]
fn file_round_trip_feeds_the_pipeline() {
    let insts = vec![instrument("a", spec(0.1, 0.2, 0.7, 4)), instrument("b", spec(0.0, 0.1, 0.0, 5))];
    let mut buf = Vec::new();
    write_returns(&mut buf, &insts).unwrap();
    let back = read_returns(buf.as_slice(), IngestMode::Returns).unwrap();
    assert_eq!(back, insts);
    let cfg = EmpiricalConfig::default();
    assert_eq!(run_empirical(&back, &cfg).unwrap(), run_empirical(&insts, &cfg).unwrap());
}

#[test]
fn one_bad_instrument_does_not_sink_the_rest() {
    let mut short = spec(0.0, 0.1, 0.0, 6);
    short.len = 40;
    let insts = vec![instrument("long", spec(0.0, 0.1, 0.0, 7)), instrument("short", short)];
    let report = run_empirical(&insts, &EmpiricalConfig::default()).unwrap();
    assert!(report.instruments[0].analysis.is_some());
    assert!(report.instruments[1].analysis.is_none());
    assert!(report.instruments[1].error.as_ref().unwrap().contains("groups too small"));
    let mut csv = Vec::new();
    report.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.lines().any(|l| l.starts_with("short,") && l.contains("groups too small")));
}
