use dunkl::config::{RootSystemSource, SuiteConfig};
use dunkl::verify::{run_suite, Report, Status};
use dunkl::Error;

fn config(rs: &str, checks: &[&str]) -> SuiteConfig {
    SuiteConfig {
        root_system: RootSystemSource::Text(rs.into()),
        checks: checks.iter().map(|s| s.to_string()).collect(),
        ..SuiteConfig::default()
    }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn unknown_check_is_rejected() {
    assert!(matches!(run_suite(&config("a1:k=1", &["NOPE"])), Err(Error::UnknownCheck(_))));
}

#[test]
fn kernel_checks_skip_on_non_product_systems() {
    let report = run_suite(&config("a2:k=1", &["HEAT_KERNEL", "PLANCHEREL", "GRAD_SEMIGROUP"])).unwrap();
    assert!(report.checks.iter().all(|c| c.status == Status::SkippedUnsupported));
    assert!(report.passed());
}

#[test]
fn report_round_trips_and_ignores_thread_count() {
    let cfg = config("b2:k=1,0.5", &["MEASURE_IDENTITIES", "CDC_IDENTITY", "GAMMA_LOWER", "ISO_RATIO", "NASH"]);
    let one = in_pool(1, || run_suite(&cfg).unwrap().to_json().unwrap());
    let four = in_pool(4, || run_suite(&cfg).unwrap().to_json().unwrap());
    assert_eq!(one, four);
    let back = Report::from_json(&one).unwrap();
    assert_eq!(back.to_json().unwrap(), one);
    assert!(back.passed());
}

#[test]
fn seed_changes_the_mixture_family() {
    let a = run_suite(&config("a1:k=1", &["NASH"])).unwrap();
    let b = run_suite(&SuiteConfig { seed: 7, ..config("a1:k=1", &["NASH"]) }).unwrap();
    let names = |r: &Report| r.checks[0].rows.iter().map(|row| row.field.clone()).collect::<Vec<_>>();
    assert_ne!(names(&a), names(&b));
}
