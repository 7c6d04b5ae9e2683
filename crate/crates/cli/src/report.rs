//! Fixed table of bounds: quadratic splitting types, generic degrees and
//! cyclotomic conductors up to 50.

use serde::Serialize;

use cmbound::bounds::{generic_bound, lower_bound, ratio_string, BoundResult};
use cmbound::numfield::{normalize, splitting_of_5, FieldDescriptor, RawDescriptor};
use cmbound::Result;

pub const CYCLOTOMIC_MAX: u64 = 50;
pub const GENERIC_DEGREES: [u32; 6] = [2, 4, 6, 8, 10, 12];

#[derive(Serialize)]
pub struct Row {
    pub label: String,
    pub degree: u64,
    pub kind: &'static str,
    pub e: u32,
    pub f: u32,
    pub r: u32,
    pub power_form: String,
    pub exact: String,
    pub decimal: String,
}

#[derive(Serialize)]
pub struct Report {
    pub quadratic: Vec<Row>,
    pub generic: Vec<Row>,
    pub cyclotomic: Vec<Row>,
}

fn row(label: String, degree: u64, kind: &'static str, b: BoundResult) -> Row {
    Row {
        label,
        degree,
        kind,
        e: b.e,
        f: b.f,
        r: b.r,
        power_form: b.power_form(),
        exact: ratio_string(&b.exact),
        decimal: b.decimal,
    }
}

fn field_row(d: FieldDescriptor) -> Row {
    let s = splitting_of_5(&d);
    row(d.to_string(), d.degree(), s.kind(), lower_bound(s))
}

pub fn build() -> Result<Report> {
    let quadratic = [1, 2, 5]
        .into_iter()
        .map(|m| normalize(RawDescriptor::Quadratic(m)).map(field_row))
        .collect::<Result<_>>()?;
    let generic = GENERIC_DEGREES
        .iter()
        .map(|&deg| {
            generic_bound(deg).map(|b| {
                let mut r = row(format!("degree {deg}"), deg as u64, "generic", b);
                r.power_form = format!("(4/5)^{}", 2 * deg);
                r
            })
        })
        .collect::<Result<_>>()?;
    let cyclotomic = (3..=CYCLOTOMIC_MAX)
        .filter(|n| n % 5 != 0 && n % 4 != 2)
        .map(|n| normalize(RawDescriptor::Cyclotomic(n)).map(field_row))
        .collect::<Result<_>>()?;
    Ok(Report {
        quadratic,
        generic,
        cyclotomic,
    })
}

fn section(title: &str, rows: &[Row], out: &mut Vec<String>) {
    out.push(title.to_string());
    out.push(format!(
        "  {:<12} {:>3} {:<9} {:>9}  {:<16} {:<14} exact",
        "field", "deg", "type", "(e,f,r)", "bound", "decimal"
    ));
    for r in rows {
        out.push(format!(
            "  {:<12} {:>3} {:<9} {:>9}  {:<16} {:<14} {}",
            r.label,
            r.degree,
            r.kind,
            format!("({},{},{})", r.e, r.f, r.r),
            r.power_form,
            r.decimal,
            r.exact
        ));
    }
}

pub fn table(rep: &Report) -> Vec<String> {
    let mut out = Vec::new();
    section("quadratic fields", &rep.quadratic, &mut out);
    out.push(String::new());
    section(
        "generic CM fields, (e,f,r) = (1,1,deg)",
        &rep.generic,
        &mut out,
    );
    out.push(String::new());
    section(
        &format!("cyclotomic fields Q(zeta n), n <= {CYCLOTOMIC_MAX}, 5 not dividing n"),
        &rep.cyclotomic,
        &mut out,
    );
    out
}
