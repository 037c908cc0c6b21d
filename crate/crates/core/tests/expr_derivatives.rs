//! Taylor expansions of parsed expressions against finite differences.

use cartan_dress::expr::parse;

const CORPUS: [&str; 20] = [
    "x0*x1 + x2^2",
    "sin(x0) * cos(x1)",
    "exp(2*x0 - x2)",
    "log(2 + x0^2 + x1)",
    "sqrt(3 + x0 + x1*x2)",
    "tan(0.3*x0 + 0.2*x1)",
    "sinh(x0) - cosh(x1*x2)",
    "1/(1 + x0^2 + x1^2)",
    "(x0 + 2)^-1.5",
    "(1 + x1^2)^0.5 * x2",
    "-x0^2^1",
    "x0^3 - 3*x0*x1^2",
    "exp(-x0^2) * sin(3*x2)",
    "cos(x0*x1*x2)",
    "log(cosh(x0)) + x1",
    "(x0 - x1)/(2 + x2)",
    "2.5e-1*x0^4 + x1",
    "sqrt(exp(x0) + x1^2)",
    "sin(sin(x1)) * x0",
    "3.14159*x0 + exp(x1)^2",
];

const X: [f64; 3] = [0.21, -0.13, 0.34];

fn shifted(dirs: &[(usize, f64)]) -> Vec<f64> {
    let mut x = X.to_vec();
    for &(v, s) in dirs {
        x[v] += s;
    }
    x
}

#[test]
fn first_derivatives_match_central_differences() {
    let h = 1e-5;
    for src in CORPUS {
        let e = parse(src, 3).unwrap();
        let t = e.eval_taylor(&X, 3).unwrap();
        assert!((t.value() - e.eval(&X)).abs() < 1e-14, "{src}");
        for v in 0..3 {
            let fd = (e.eval(&shifted(&[(v, h)])) - e.eval(&shifted(&[(v, -h)]))) / (2.0 * h);
            let d = t.partial(&[v]);
            assert!((d - fd).abs() < 1e-7 * d.abs().max(1.0), "{src}: d{v} {d} vs {fd}");
        }
    }
}

#[test]
fn second_derivatives_match_central_differences() {
    let h = 1e-3;
    for src in CORPUS {
        let e = parse(src, 3).unwrap();
        let t = e.eval_taylor(&X, 3).unwrap();
        for v in 0..3 {
            for w in 0..3 {
                let f = |a: f64, b: f64| e.eval(&shifted(&[(v, a), (w, b)]));
                let fd = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
                let d = t.partial(&[v, w]);
                assert!((d - fd).abs() < 1e-5 * d.abs().max(1.0), "{src}: d{v}{w} {d} vs {fd}");
            }
        }
    }
}

#[test]
fn third_derivatives_match_differences_of_second() {
    let h = 1e-4;
    for src in CORPUS {
        let e = parse(src, 3).unwrap();
        for v in 0..3 {
            let up = e.eval_taylor(&shifted(&[(v, h)]), 3).unwrap();
            let down = e.eval_taylor(&shifted(&[(v, -h)]), 3).unwrap();
            let t = e.eval_taylor(&X, 3).unwrap();
            for a in 0..3 {
                for b in a..3 {
                    let fd = (up.partial(&[a, b]) - down.partial(&[a, b])) / (2.0 * h);
                    let d = t.partial(&[v, a, b]);
                    assert!(
                        (d - fd).abs() < 1e-6 * d.abs().max(1.0),
                        "{src}: d{v}{a}{b} {d} vs {fd}"
                    );
                }
            }
        }
    }
}
