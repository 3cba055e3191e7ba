use serde_json::Value;
use ultralip::{PadicScalar, Qp, Rational};
use ultralip_web::{ball_explorer, extension_explorer, hensel_explorer, monna};

fn json(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.unwrap()).unwrap()
}

#[test]
fn monna_map_reverses_digits() {
    let q3 = Qp::new(3).unwrap();
    // 1 + 2*3 = 7 maps to 1/3 + 2/9
    let x = PadicScalar::Exact(Rational::from_integer(7));
    assert!((monna(&q3, &x, 0, 3).unwrap() - (1.0 / 3.0 + 2.0 / 9.0)).abs() < 1e-12);
    let y = PadicScalar::Exact(Rational::from_integer(9));
    assert!((monna(&q3, &y, 0, 3).unwrap() - 1.0 / 27.0).abs() < 1e-12);
    assert_eq!(monna(&q3, &PadicScalar::Exact(Rational::new(1, 3).unwrap()), 0, 3), None);
}

#[test]
fn ball_members_and_probe() {
    let v = json(ball_explorer(r#"{"p": 3, "l": 1, "m": 1, "residue": 2, "depth": 2, "probe": "15"}"#));
    assert_eq!(v["radius"], "p^-2");
    assert_eq!(v["canonical_point"], "6");
    assert_eq!(v["members"].as_array().unwrap().len(), 9);
    assert_eq!(v["probe"]["contains"], true);
    assert_eq!(v["probe"]["distance"], "0");
    let far = json(ball_explorer(r#"{"p": 3, "l": 1, "m": 1, "residue": 2, "probe": "1"}"#));
    assert_eq!(far["probe"]["contains"], false);
    assert_eq!(far["probe"]["distance"], "p^0");
}

#[test]
fn isometric_extension_is_one_lipschitz_and_center_is_not() {
    let base = r#"{"p": 3, "a": 1, "e": "1", "xi": "1", "m": 2, "l_min": 0, "l_max": 2, "digits": 5, "method": "METHOD"}"#;
    let iso = json(extension_explorer(&base.replace("METHOD", "isometric")));
    assert_eq!(iso["claimed"], "p^0");
    assert_eq!(iso["estimate"], "p^0");
    assert_eq!(iso["pass"], true);
    assert_eq!(iso["points"].as_array().unwrap().len(), 243);
    let center = json(extension_explorer(&base.replace("METHOD", "center")));
    assert_eq!(center["claimed"], "p^2");
    assert_eq!(center["estimate"], "p^1");
    assert_eq!(center["pass"], true);
}

#[test]
fn extension_rejects_large_lattices_and_bad_primes() {
    let big = r#"{"p": 7, "a": 1, "e": "1", "xi": "1", "m": 1, "l_min": 0, "l_max": 2, "digits": 5, "method": "phi"}"#;
    assert!(extension_explorer(big).unwrap_err().contains("too many"));
    let bad = r#"{"p": 9, "a": 1, "e": "1", "xi": "1", "m": 1, "l_min": 0, "l_max": 2, "method": "phi"}"#;
    assert!(extension_explorer(bad).unwrap_err().contains("not a prime"));
}

#[test]
fn hensel_roots_are_verified() {
    let v = json(hensel_explorer(r#"{"p": 7, "u": "2", "b": 2, "digits": 6}"#));
    let roots = v["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 2);
    assert!(roots.iter().all(|r| r["verified"] == true));
    assert!(hensel_explorer(r#"{"p": 7, "u": "3", "b": 2}"#).unwrap_err().contains("no root"));
}
