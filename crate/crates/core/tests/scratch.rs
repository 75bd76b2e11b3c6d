use forwarders::dsl::parse_context;
use forwarders::syntax::*;
use forwarders::Context;

#[test]
fn dbg_criss_cross() {
    let ctx = parse_context(
        "{ x : (~name @ ((~cost * bot[y])[y]))[y], y : (cost @ ((name * 1[x])[x]))[x] }",
    )
    .unwrap();
    println!("parsed : {ctx}");
    let xt = AnnType::par(
        PlainType::dual_atom("name"),
        Name::new("y"),
        AnnType::tensor(PlainType::dual_atom("cost"), Name::new("y"), AnnType::Bot(Name::new("y"))),
    );
    let yt = AnnType::par(
        PlainType::atom("cost"),
        Name::new("x"),
        AnnType::tensor(PlainType::atom("name"), Name::new("x"), AnnType::One(vec![Name::new("x")])),
    );
    let fix = Context::of_types([(Name::new("x"), xt), (Name::new("y"), yt)]).unwrap();
    println!("fixture: {fix}");
    assert_eq!(ctx, fix, "parse mismatch");

    let synth = forwarders::synth_annotated(&fix, &forwarders::SynthConfig::default());
    for (p, _) in &synth {
        println!("synth  : {p}");
    }
    let lp = forwarders::live_path(&fix).unwrap();
    println!(
        "live   : {:?}",
        lp.map(|ls| ls.iter().map(|l| l.to_string()).collect::<Vec<_>>())
    );
}
