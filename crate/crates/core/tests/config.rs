use proptest::prelude::*;

use skewbc::config::parse_config;
use skewbc::Error;

const TWO_PRESETS: &str = r#"
system = "iee"
order = 2

[grid]
nodes = [11, 11]

[boundary.west]
preset = "iee-characteristic-inflow"
[boundary.south]
preset = "iee-characteristic-inflow"
[boundary.east]
preset = "iee-pressure-outflow"
[boundary.north]
preset = "iee-pressure-outflow"

[time]
t_end = 0.1
cfl = 0.5
"#;

fn error_path(text: &str) -> String {
    match parse_config(text) {
        Err(Error::Config { path, .. }) => path,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn minimal_two_preset_config() {
    let c = parse_config(TWO_PRESETS).unwrap();
    assert_eq!(c.order, 2);
    assert_eq!(c.grid.nodes, vec![11, 11]);
    assert_eq!(c.faces().len(), 4);
}

#[test]
fn spec_errors() {
    let err = parse_config(&TWO_PRESETS.replace("order = 2", "order = 3")).unwrap_err();
    assert!(err.to_string().contains("unsupported order"), "{err}");
    let cee = TWO_PRESETS
        .replace("system = \"iee\"", "system = \"cee\"")
        .replace("iee-characteristic-inflow", "cee-characteristic-inflow")
        .replace("iee-pressure-outflow", "cee-outflow")
        + "[parameters]\ngamma = 1.0\n";
    let err = parse_config(&cee).unwrap_err();
    assert!(err.to_string().contains("γ>1 required"), "{err}");
}

#[test]
fn missing_face_and_time_choice() {
    let text = TWO_PRESETS.replace("[boundary.north]\npreset = \"iee-pressure-outflow\"\n", "");
    assert_eq!(error_path(&text), "boundary.north");
    assert_eq!(error_path(&TWO_PRESETS.replace("cfl = 0.5", "cfl = 0.5\ndt = 0.01")), "time");
    assert_eq!(error_path(&TWO_PRESETS.replace("nodes = [11, 11]", "nodes = [11, 1]")), "grid.nodes[1]");
}

proptest! {
    #[test]
    fn unknown_keys_are_rejected_with_their_table(
        table in prop::sample::select(vec!["grid", "boundary.west", "time"]),
        key in "[a-z]{3,8}",
    ) {
        prop_assume!(!["nodes", "x", "y", "preset", "presets", "scenario", "inflow", "outflow", "mode", "data",
                       "t_end", "cfl", "dt", "cadence"].contains(&key.as_str()));
        let header = format!("[{table}]\n");
        let text = TWO_PRESETS.replacen(&header, &format!("{header}{key} = 1\n"), 1);
        let path = error_path(&text);
        prop_assert_eq!(path, table);
    }

    #[test]
    fn arbitrary_text_never_panics(text in "[ -~\n]{0,200}") {
        match parse_config(&text) {
            Ok(_) => {}
            Err(Error::Config { path, .. }) => prop_assert!(!path.is_empty()),
            Err(other) => prop_assert!(false, "unexpected error kind {other:?}"),
        }
    }

    #[test]
    fn supported_orders_with_enough_nodes_parse(order in prop::sample::select(vec![2u32, 4, 6]), extra in 0usize..20) {
        let nodes = [2usize, 8, 12][(order / 2 - 1) as usize] + extra;
        let text = TWO_PRESETS
            .replace("order = 2", &format!("order = {order}"))
            .replace("nodes = [11, 11]", &format!("nodes = [{nodes}, {nodes}]"));
        prop_assert!(parse_config(&text).is_ok());
    }
}
