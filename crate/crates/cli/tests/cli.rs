use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn dynlcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynlcs")).args(args).output().expect("binary runs")
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_dynlcs"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn streams() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("streams");
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    out.sort();
    assert!(out.len() >= 6);
    out
}

fn update_count(path: &Path) -> usize {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines().skip(3).filter(|l| !l.trim().is_empty()).count()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn bundled_streams_pass_the_oracle() {
    for path in streams() {
        let p = path.to_str().unwrap();
        for seed in ["0", "17"] {
            let o = dynlcs(&["--oracle-check", "--seed", seed, p]);
            assert!(o.status.success(), "{p} seed {seed}: {}", stderr(&o));
            let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
            assert_eq!(lines.len(), update_count(&path) + 1, "{p}");
            for (i, l) in lines.iter().enumerate() {
                assert!(l.starts_with(&format!("{i} ")), "{p}: {l}");
            }
        }
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    for path in streams() {
        let p = path.to_str().unwrap();
        for flags in [vec!["--seed", "5"], vec!["--seed", "5", "--json"]] {
            let args: Vec<&str> = flags.iter().copied().chain([p]).collect();
            let (a, b) = (dynlcs(&args), dynlcs(&args));
            assert!(a.status.success());
            assert_eq!(a.stdout, b.stdout, "{p} {flags:?}");
        }
    }
}

#[test]
fn known_answers() {
    let o = with_stdin(&["-"], "full\nabaab\nbaaba\n");
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("0 4 "), "{out}");
    assert_eq!(out.lines().count(), 1);

    let o = with_stdin(&["--oracle-check", "-"], "partial\nabaab\n$$$$$\nS 3 a\nS 2 b\nS 4 a\nS 5 b\n");
    assert!(o.status.success(), "{}", stderr(&o));
    let lengths: Vec<String> = stdout(&o).lines().map(|l| l.split(' ').nth(1).unwrap().to_string()).collect();
    assert_eq!(lengths, ["0", "1", "2", "3", "4"]);

    let o = with_stdin(&["-"], "full\nab\nxy\n");
    assert_eq!(stdout(&o), "0 0 - -\n");
}

#[test]
fn json_lines_carry_the_same_fields() {
    let text = "full\nxbcz\nabcd\nT 1 a\nT 4 d\n";
    let plain = stdout(&with_stdin(&["-"], text));
    let json = stdout(&with_stdin(&["--json", "-"], text));
    for (p, j) in plain.lines().zip(json.lines()) {
        let f: Vec<&str> = p.split(' ').collect();
        let v = |s: &str| if s == "-" { "null".to_string() } else { s.to_string() };
        let want = format!("{{\"index\":{},\"length\":{},\"s_pos\":{},\"t_pos\":{}}}", f[0], f[1], v(f[2]), v(f[3]));
        assert_eq!(j, want);
    }
    assert!(json.lines().last().unwrap().starts_with("{\"index\":2,\"length\":4,"));
}

#[test]
fn input_errors_exit_2_with_line_numbers() {
    let cases = [
        ("full\nabc\nabc\nS 1 a\nS 4 a\n", "line 5"),
        ("partial\nabc\nabc\nT 1 a\n", "line 4"),
        ("full\nabc\nabc\nS one a\n", "line 4"),
        ("stream\nabc\nabc\n", "line 1"),
        ("full\nabc\n", "line 3"),
        ("full\nabc\nabc\nS 2 xy\n", "line 4"),
    ];
    for (text, want) in cases {
        let o = with_stdin(&["-"], text);
        assert_eq!(o.status.code(), Some(2), "{text:?}");
        assert!(stderr(&o).contains(want), "{text:?}: {}", stderr(&o));
        assert!(o.stdout.is_empty(), "{text:?}: nothing is replayed from a bad stream");
    }
    let o = dynlcs(&["/nonexistent/stream.txt"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(dynlcs(&[]).status.code(), Some(2), "missing stream is a usage error");
}

#[test]
fn bench_prints_csv() {
    let o = dynlcs(&["--bench", "--mode", "partial", "--sizes", "64,128", "--ops", "20"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,ops,mean_us,median_us,p99_us");
    assert_eq!(lines.len(), 3);
    for (line, n) in lines[1..].iter().zip(["64", "128"]) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!((f[0], f[1]), (n, "20"));
        let v: Vec<f64> = f[2..].iter().map(|x| x.parse().unwrap()).collect();
        assert!(v.iter().all(|&x| x >= 0.0) && v[1] <= v[2]);
    }
    let o = dynlcs(&["--bench", "--sizes", "32", "--ops", "10"]);
    assert!(o.status.success());
}
