use std::io::Write;

use fairsurv::dataio::{bundled_schema, load_csv, read_csv, write_csv, DatasetSchema, BUNDLED_SCHEMAS};
use fairsurv::fairness::GroupRule;
use fairsurv::{Error, FeatureValue, SensitiveValue};

const ROSSI_LIKE: &str = "\
week,arrest,fin,age,race,wexp,mar,paro,prio,educ,emp1
20,1,no,27,black,no,not married,yes,3,3,no
17,1,no,18,black,no,not married,yes,8,4,no
25,1,no,19,other,yes,not married,yes,13,3,no
52,0,yes,23,black,yes,married,yes,1,5,yes
52,0,no,19,other,yes,not married,yes,3,3,no
52,0,no,24,black,yes,not married,no,2,4,no
23,1,no,25,black,yes,married,yes,0,4,yes
52,0,yes,21,black,yes,not married,yes,4,3,no
";

#[test]
fn rossi_layout_loads() {
    let schema = bundled_schema("rossi").unwrap();
    let data = read_csv(ROSSI_LIKE.as_bytes(), &schema).unwrap();
    assert_eq!(data.len(), 8);
    assert_eq!(data.event_count(), 4);
    assert_eq!(data.n_features(), 9);
    assert_eq!(data.records[2].time, 25.0);
    assert_eq!(data.records[0].features[1], FeatureValue::Numeric(27.0));
    assert_eq!(data.records[2].group_raw, SensitiveValue::Label("other".into()));
    let partition = GroupRule::from_dataset(&data).unwrap().partition(&data).unwrap();
    let black = ROSSI_LIKE.lines().skip(1).filter(|l| l.contains(",black,")).count();
    let deprived = partition.members().iter().map(Vec::len).collect::<Vec<_>>();
    assert!(deprived.contains(&black));
}

#[test]
fn all_bundled_schemas_parse() {
    for name in BUNDLED_SCHEMAS {
        let schema = bundled_schema(name).unwrap();
        schema.validate().unwrap();
        assert_eq!(DatasetSchema::from_toml(&schema.to_toml().unwrap()).unwrap(), schema);
    }
    assert!(bundled_schema("nope").is_err());
}

#[test]
fn bad_cells_name_row_and_column() {
    let schema = bundled_schema("rossi").unwrap();
    let text = ROSSI_LIKE.replace("17,1,no,18", "17,1,no,eighteen");
    match read_csv(text.as_bytes(), &schema) {
        Err(Error::Parse { row, column, .. }) => {
            assert_eq!(row, 3);
            assert_eq!(column, "age");
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
    let text = ROSSI_LIKE.replace("week,", "weeks,");
    assert!(matches!(read_csv(text.as_bytes(), &schema), Err(Error::Schema(_))));
    let text = ROSSI_LIKE.replace("20,1,", "20,2,");
    assert!(read_csv(text.as_bytes(), &schema).is_err());
}

#[test]
fn file_round_trip() {
    let schema = bundled_schema("rossi").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("in.csv");
    std::fs::File::create(&src).unwrap().write_all(ROSSI_LIKE.as_bytes()).unwrap();
    let data = load_csv(&src, &schema).unwrap();
    let out = dir.path().join("out.csv");
    write_csv(&out, &data, &schema).unwrap();
    assert_eq!(load_csv(&out, &schema).unwrap(), data);
    assert!(matches!(load_csv(dir.path().join("missing.csv"), &schema), Err(Error::Io(_))));
}
