use mllu::gen::{eta_expansion, random_net};
use mllu::netcore::parse_description;
use mllu::typing::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const B0: &str = "par_s^{q,p,r}(tensor_r^{p,q}(ax_p, ax_q))";
const B1: &str = "par_s^{p,q,r}(tensor_r^{p,q}(ax_p, ax_q))";

fn f(s: &str) -> Formula {
    s.parse().unwrap()
}

#[test]
fn duality() {
    assert_eq!(dual(&f("a")), f("~a"));
    let b = f("P(~a,~a,T(a,a))");
    assert_eq!(dual(&dual(&b)), b);
    assert_eq!(dual(&b), f("T(P(~a,~a),a,a)"));
}

#[test]
fn depths() {
    assert_eq!(formula_depth(&f("~a")), 1);
    let b = f("P(~a,~a,T(a,a))");
    assert_eq!(formula_depth(&b), 3);
    assert_eq!(formula_depth(&Formula::Tensor(vec![b.clone(), b])), 4);
}

#[test]
fn text_syntax() {
    for s in ["a", "~b", "T(a,~a)", "P(z1,T(a,b,c),~q)"] {
        assert_eq!(f(s).to_string(), s);
    }
    for bad in ["T(a)", "~T(a,b)", "P(a,", "A", "a0"] {
        assert!(bad.parse::<Formula>().is_err(), "{bad}");
    }
    assert_eq!(var_name(27), "b1");
    assert_eq!(parse_var_name("b1"), Some(27));
}

#[test]
fn b1_principal_type() {
    let net = parse_description(B1).unwrap();
    let (seq, asg) = infer_principal_type(&net).unwrap();
    assert!(seq.alpha_eq(&Sequent(vec![f("P(~a,~b,T(a,b))")])));
    asg.check(&net).unwrap();
    // identifying the two variables gives the Boolean type
    let b = asg.substitute(1, &Formula::Var(0));
    assert_eq!(b.conclusions, vec![Formula::boolean(&Formula::Var(0))]);
    b.check(&net).unwrap();
}

#[test]
fn b0_principal_type() {
    let net = parse_description(B0).unwrap();
    let (seq, _) = infer_principal_type(&net).unwrap();
    assert!(seq.alpha_eq(&Sequent(vec![f("P(~b,~a,T(a,b))")])));
}

#[test]
fn axiom_type() {
    let (seq, _) = infer_principal_type(&parse_description("ax_p").unwrap()).unwrap();
    assert_eq!(seq.0, vec![f("a"), f("~a")]);
}

#[test]
fn sizes_and_depths() {
    let b0 = parse_description(B0).unwrap();
    assert_eq!(net_size(&b0), 4);
    assert_eq!(net_size(&Default::default()), 0);
    assert_eq!(net_size(&b0.disjoint_union(&b0)), 8);
    assert_eq!(net_depth(&parse_description(B1).unwrap()).unwrap(), 0);
    assert_eq!(
        net_depth(&parse_description("cut(ax_p, ax_q)").unwrap()).unwrap(),
        1
    );
}

#[test]
fn cut_unifies_instances() {
    // b1 cut against the η-expansion of the dual of B: the cut has type B
    let b1 = parse_description(B1).unwrap();
    let eta = eta_expansion(&dual(&Formula::boolean(&Formula::Var(0))));
    let mut b = mllu::netcore::NetBuilder::from_net(Default::default());
    let x = b.import(&b1);
    let y = b.import(&eta);
    b.connect(x[0], y[1]);
    b.conclude(y[0]);
    let net = b.finish().unwrap();
    assert_eq!(net_depth(&net).unwrap(), 3);
}

#[test]
fn clash_is_reported() {
    let net =
        parse_description("cut(tensor_t^{p,q}(ax_p, ax_q), tensor_u^{r,s}(ax_r, ax_s))").unwrap();
    assert!(matches!(net_depth(&net), Err(TypeError::Clash(..))));
}

#[test]
fn boolean_instances() {
    let (seq, _) = infer_principal_type(&parse_description(B1).unwrap()).unwrap();
    assert!(matches!(boolean_instance(&seq.0[0]), Some(Formula::Var(_))));
    assert_eq!(boolean_instance(&f("P(~a,~b,T(a,~a))")), None);
    assert_eq!(boolean_instance(&f("T(a,b)")), None);
    assert_eq!(boolean_instance(&f("P(~a,~a,T(a,a,a))")), None);
    assert_eq!(boolean_instance(&f("P(c,~b,T(a,b))")), Some(f("a")));
    assert_eq!(
        boolean_instance(&f("P(~a,~b,T(T(c,d),b))")),
        Some(f("T(c,d)"))
    );
}

fn formula_strategy() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        (0u32..4).prop_map(Formula::Var),
        (0u32..4).prop_map(Formula::DualVar)
    ];
    leaf.prop_recursive(4, 40, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::Tensor),
            prop::collection::vec(inner, 2..4).prop_map(Formula::Par),
        ]
    })
}

proptest! {
    #[test]
    fn boolean_type_is_its_own_instance(a in formula_strategy()) {
        let got = boolean_instance(&Formula::boolean(&a)).unwrap();
        prop_assert_eq!(Formula::boolean(&got), Formula::boolean(&a));
    }

    #[test]
    fn dual_is_an_involution(a in formula_strategy()) {
        prop_assert_eq!(dual(&dual(&a)), a.clone());
        prop_assert_eq!(formula_depth(&dual(&a)), formula_depth(&a));
        let back: Formula = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn eta_expansion_has_dual_conclusions(a in formula_strategy()) {
        let net = eta_expansion(&a);
        let (seq, _) = infer_principal_type(&net).unwrap();
        prop_assert_eq!(seq.0.len(), 2);
        prop_assert_eq!(dual(&seq.0[0]), seq.0[1].clone());
        prop_assert_eq!(formula_depth(&seq.0[1]), formula_depth(&a));
    }

    #[test]
    fn instances_still_type_check(seed in any::<u64>(), n in 1usize..30, a in formula_strategy()) {
        let net = random_net(&mut ChaCha8Rng::seed_from_u64(seed), n);
        let (_, asg) = infer_principal_type(&net).unwrap();
        asg.check(&net).unwrap();
        let mut vars = Vec::new();
        for c in &asg.conclusions { c.vars(&mut vars); }
        for p in asg.ports.values() { p.vars(&mut vars); }
        let x = vars[0];
        let inst = asg.substitute(x, &a);
        prop_assert!(inst.check(&net).is_ok());
        prop_assert!(asg.cut_depth(&net) <= inst.cut_depth(&net));
        prop_assert_eq!(asg.cut_depth(&net), net_depth(&net).unwrap());
    }
}
