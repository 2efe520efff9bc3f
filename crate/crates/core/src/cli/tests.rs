use super::*;
use crate::coords::eps_carnot;

fn carnot(args: &str) -> Outcome {
    run(std::iter::once("carnot").chain(args.split_whitespace()))
}

#[test]
fn group_commands() {
    let out = carnot("group mul heisenberg3.json 1,0,0 0,1,0");
    assert_eq!((out.code, out.stdout.as_str()), (0, "1,1,1/2\n"));
    assert_eq!(carnot("group mul engel_group.json 1,0,0,0 0,1,0,0").stdout, "1,1,1/2,1/12\n");
    assert_eq!(carnot("group inv heisenberg3.json 1,-1/2,3").stdout, "-1,1/2,-3\n");
    assert_eq!(carnot("group table engel_group.json").stdout, "L_12^3 = 1\nL_13^4 = 1\n");
    let out = carnot("--json group mul heisenberg3.json 1,0,0 0,1,0");
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["result"], json!(["1", "1", "1/2"]));
}

#[test]
fn exit_codes() {
    assert_eq!(carnot("validate heisenberg3.json").code, 0);
    assert_eq!(carnot("validate abelian2.json").code, 0);
    assert_eq!(carnot("validate corrupted_engel.json").code, 1);
    assert_eq!(carnot("validate heisenberg_cubic.json").code, 1);
    assert_eq!(carnot("validate no_such_file.json").code, 2);
    assert_eq!(carnot("group mul heisenberg3.json 1,0 0,1,0").code, 2);
    assert_eq!(carnot("group mul heisenberg3.json 1,x,0 0,1,0").code, 2);
    assert_eq!(carnot("frobnicate").code, 2);
    assert_eq!(carnot("--help").code, 0);
}

#[test]
fn osculate_guards_non_carnot_input() {
    let out = carnot("diff osculate heisenberg_cubic.json");
    assert_eq!(out.code, 1);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["error"]["kind"], "precondition");
    assert!(v["error"]["message"].as_str().unwrap().contains("not a Carnot manifold map"));
    assert_eq!(carnot("diff osculate heisenberg_contact.json").code, 0);
}

#[test]
fn reports_are_deterministic() {
    for cmd in ["validate variable_heisenberg.json", "diff check heisenberg_contact.json --at 1,1,0", "groupoid axioms --pair heisenberg_shear"] {
        let a = carnot(&format!("--json {cmd}"));
        let b = carnot(&format!("--json --jobs 4 {cmd}"));
        assert_eq!(a, b, "{cmd}");
        assert_eq!(a.code, 0, "{}", a.stdout);
    }
    let a = carnot("--json --seed 7 validate heisenberg3.json");
    assert_eq!(a, carnot("--json --seed 7 validate heisenberg3.json"));
}

#[test]
fn eps_output_reparses() {
    let out = carnot("coords eps variable_heisenberg.json --at 1,1/2,0");
    assert_eq!(out.code, 0);
    let e = io::parse_eps_str(&out.stdout).unwrap();
    let f = crate::fixtures::variable_heisenberg();
    let a = parse_point("1,1/2,0").unwrap();
    assert_eq!(e, eps_carnot(&f.with_basepoint(a.clone()).unwrap(), &a).unwrap());
}

#[test]
fn heatlift_emits_a_valid_structure() {
    let out = carnot("heatlift heisenberg3.json");
    assert_eq!(out.code, 0);
    let s = io::parse_structure_str(&out.stdout, None).unwrap();
    assert_eq!(s.name, "heisenberg3_heat");
    assert_eq!(s.frame.weights().as_slice(), &[1, 1, 2, 2]);
    assert!(s.report.is_ok(), "{}", s.report.summary());
}

#[test]
fn pansu_and_groupoid_commands() {
    let out = carnot("pansu heisenberg_contact.json --at 1,0,0 --dir 1,1,0");
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(out.stdout.starts_with("prediction 1,3,0\n"));
    assert_eq!(carnot("pansu heisenberg_cubic.json --at 1,0,0 --dir 1,1,0").code, 1);
    assert_eq!(carnot("groupoid mult heisenberg3.json --x 0,0,0 --y 1,0,0 --z 0,1,0 --t 0").stdout, "1,1,1/2\n");
    assert_eq!(carnot("groupoid invert --pair plane_bend --x 1,2 --y 1,1 --t 1/3").stdout, "(4/3,7/3 ; -1,-1 ; 1/3)\n");
    let out = carnot("--json groupoid transition --pair heisenberg_reframed --x 1,1,0 --y 1,1,1 --t 1/4");
    assert_eq!(out.code, 0, "{}", out.stdout);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["theta_zero"], false);
    assert!(v["slope"].as_f64().unwrap() >= 0.9);
    let out = carnot("groupoid transition heisenberg3.json --frame perturbed_heisenberg.json --x 0,0,0 --y 1,1,1 --t 1/4");
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("does not span the filtration"), "{}", out.stdout);
    assert_eq!(carnot("groupoid probe --pair heisenberg_reframed --x 1,1,0 --xi 1,0,1").code, 0);
    assert_eq!(carnot("groupoid probe --pair nowhere --x 1 --xi 1").code, 2);
}
