use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracdim")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

fn check_format(csv: &str, header: &str) {
    assert!(!csv.contains('\r'));
    assert!(csv.ends_with('\n'));
    assert_eq!(csv.lines().next().unwrap(), header);
    for r in rows(csv) {
        for cell in r {
            if cell.contains('.') {
                let mantissa = cell.trim_start_matches('-').split('e').next().unwrap();
                assert_eq!(mantissa.replace('.', "").len(), 17, "{cell}");
            }
        }
    }
}

#[test]
fn complex_lattice() {
    let o = run(&["poles", "--triple", "complex", "--eps", "1,0.5", "--nmax", "3", "--mmax", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    check_format(&csv, "re,im,n,m,residue_re,residue_im");
    let r = rows(&csv);
    assert_eq!(r.len(), 16);
    let origin = r.iter().find(|r| r[2] == "0" && r[3] == "0").unwrap();
    assert!((origin[0].parse::<f64>().unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(origin[1].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn deformed_single_pole() {
    let o = run(&["poles", "--triple", "deformed", "--alpha", "0.1"]);
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 1);
    assert!((r[0][0].parse::<f64>().unwrap() - 1.0 / 0.9).abs() < 1e-12);
    assert_eq!(run(&["poles", "--triple", "deformed", "--alpha", "1.5"]).status.code(), Some(2));
}

#[test]
fn zeta_sweep_marks_poles() {
    let args = [
        "zeta", "--alpha", "0.1", "--re-min", "1.0", "--re-max", "2.0", "--im-min", "0", "--im-max", "0",
        "--points", "10", "--kmax", "20000",
    ];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    check_format(&csv, "z_re,z_im,closed_re,closed_im,direct_re,direct_im,tail_bound,at_pole");
    assert!(rows(&csv).iter().all(|r| r.len() == 8 && (r[7] == "0" || r[7] == "1")));
    assert_eq!(run(&args).stdout, o.stdout);
}

#[test]
fn junk_dichotomy() {
    let o = run(&["junk", "--alpha", "0", "--nrange", "8", "--lrange", "256"]);
    assert_eq!(o.status.code(), Some(0));
    check_format(&stdout(&o), "index,singular_value");
    assert!(String::from_utf8_lossy(&o.stderr).contains("JunkPresent"));
    let o = run(&["junk", "--alpha", "0.1", "--nrange", "8", "--lrange", "256"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("JunkAbsent"));
    assert_eq!(run(&["junk", "--alpha", "0.1", "--lrange", "8"]).status.code(), Some(3));
}

#[test]
fn distance_columns() {
    let o = run(&["distance", "--alpha", "0", "--grid", "64"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    check_format(&csv, "x,closed,lp,opnorm,gap");
    for r in rows(&csv) {
        let (x, d): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        assert!((x - d).abs() < 1e-9);
    }
    assert_eq!(run(&["distance", "--alpha", "0.5"]).status.code(), Some(2));
}

#[test]
fn distance_all_methods_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("d.csv");
    let svg_path = dir.path().join("d.svg");
    let args = [
        "distance", "--alpha", "0.1", "--grid", "3", "--method", "all", "--modes", "16", "--grid-points", "128",
        "--sides", "16", "--opnorm-modes", "4", "--window", "32",
    ];
    let mut with_out: Vec<&str> = args.to_vec();
    with_out.extend(["-o", csv_path.to_str().unwrap(), "--plot", svg_path.to_str().unwrap()]);
    assert_eq!(run(&with_out).status.code(), Some(0));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    for r in rows(&csv).iter().skip(1) {
        let v: Vec<f64> = r.iter().map(|c| c.parse().unwrap()).collect();
        assert!((v[2] - v[1]).abs() <= 0.1 * v[1], "{r:?}");
        assert!((v[4] - (v[2] - v[3])).abs() < 1e-12);
    }
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("D_{"));
    assert_eq!(run(&with_out).status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&csv_path).unwrap(), csv);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["poles", "--nmax", "many"]).status.code(), Some(2));
    assert_eq!(run(&["poles", "--triple", "complex", "--eps", "1;2"]).status.code(), Some(2));
}
