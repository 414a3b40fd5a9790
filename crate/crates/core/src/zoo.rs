//! Reference measurements of the Diffusion Rule zoo, used to name searched
//! localizations and to list rows whose shapes are not available.
//!
//! Shapes are only known for the small end of the zoo; those are the
//! `BUILTIN_*` RLE strings, each reproducible by exhaustive search.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZooKind {
    Glider,
    Oscillator,
    Puffer,
    Gun,
    PufferGun,
}

/// One reference row. `translation` and `period` follow the table columns;
/// `speed` is `translation / period` in units of c.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ZooRow {
    pub name: &'static str,
    pub kind: ZooKind,
    pub volume: i64,
    pub translation: i64,
    pub period: usize,
    pub weight: usize,
    pub diagonal: bool,
    /// What the row emits or deposits, in the table's own notation.
    pub produce: &'static str,
}

const fn glider(name: &'static str, volume: i64, translation: i64, period: usize, weight: usize) -> ZooRow {
    ZooRow { name, kind: ZooKind::Glider, volume, translation, period, weight, diagonal: false, produce: "" }
}

const fn oscillator(name: &'static str, volume: i64, period: usize, weight: usize) -> ZooRow {
    ZooRow { name, kind: ZooKind::Oscillator, volume, translation: 0, period, weight, diagonal: false, produce: "" }
}

const fn emitter(name: &'static str, kind: ZooKind, produce: &'static str, volume: i64, weight: usize) -> ZooRow {
    ZooRow { name, kind, volume, translation: 4, period: 4, weight, diagonal: false, produce }
}

pub const GLIDERS: [ZooRow; 26] = [
    glider("g1", 8, 1, 1, 4),
    glider("g2", 12, 1, 1, 4),
    glider("g3", 12, 1, 1, 4),
    glider("g4", 12, 1, 1, 4),
    glider("g5", 30, 4, 4, 7),
    glider("g6", 30, 4, 4, 7),
    glider("g7", 45, 4, 4, 14),
    glider("g8", 45, 4, 4, 14),
    glider("g9", 56, 4, 4, 14),
    glider("g10", 56, 4, 4, 14),
    glider("g11", 70, 4, 4, 24),
    glider("g12", 72, 4, 4, 14),
    glider("g13", 75, 4, 4, 18),
    glider("g14", 84, 4, 4, 24),
    glider("g15", 96, 4, 4, 18),
    glider("g16", 96, 4, 4, 22),
    glider("g17", 96, 4, 4, 26),
    glider("g18", 96, 4, 4, 30),
    glider("g19", 112, 4, 4, 26),
    glider("g20", 126, 4, 4, 26),
    glider("g21", 144, 4, 4, 26),
    glider("g22", 144, 4, 4, 30),
    glider("g23", 210, 4, 4, 38),
    glider("g24", 338, 2, 4, 52),
    glider("g25", 405, 2, 4, 79),
    ZooRow { name: "g26", kind: ZooKind::Glider, volume: 576, translation: 2, period: 8, weight: 75, diagonal: true, produce: "" },
];

pub const OSCILLATORS: [ZooRow; 5] = [
    oscillator("o1", 4, 2, 2),
    oscillator("o2", 9, 2, 3),
    oscillator("o3", 10, 4, 4),
    oscillator("o4", 16, 4, 4),
    oscillator("o5", 30, 4, 8),
];

pub const PUFFERS: [ZooRow; 16] = [
    emitter("p1", ZooKind::Puffer, "o3", 30, 7),
    emitter("p2", ZooKind::Puffer, "o1", 35, 8),
    emitter("p3", ZooKind::Puffer, "o1", 42, 9),
    emitter("p4", ZooKind::Puffer, "o1", 42, 9),
    emitter("p5", ZooKind::Puffer, "o1", 42, 10),
    emitter("p6", ZooKind::Puffer, "o1", 54, 13),
    emitter("p7", ZooKind::Puffer, "o1", 56, 9),
    emitter("p8", ZooKind::Puffer, "2 x o1", 63, 14),
    emitter("p9", ZooKind::Puffer, "o1", 63, 15),
    emitter("p10", ZooKind::Puffer, "2n x o1", 65, 14),
    emitter("p11", ZooKind::Puffer, "2 x o1", 80, 17),
    emitter("p12", ZooKind::Puffer, "o1", 84, 11),
    emitter("p13", ZooKind::Puffer, "2 x o1", 90, 11),
    emitter("p14", ZooKind::Puffer, "2 x o1", 105, 15),
    emitter("p15", ZooKind::Puffer, "2n x o1", 120, 28),
    emitter("p16", ZooKind::Puffer, "o1 or empty", 242, 22),
];

pub const GUNS: [ZooRow; 12] = [
    emitter("gun1", ZooKind::Gun, "g1", 30, 7),
    emitter("gun2", ZooKind::Gun, "g4", 50, 9),
    emitter("gun3", ZooKind::Gun, "g4", 50, 9),
    emitter("gun4", ZooKind::Gun, "g4", 60, 9),
    emitter("gun5", ZooKind::Gun, "g4", 60, 9),
    emitter("gun6", ZooKind::Gun, "g4", 72, 15),
    emitter("gun7", ZooKind::Gun, "g2 and g3", 72, 16),
    emitter("gun8", ZooKind::Gun, "2 x g4", 80, 14),
    emitter("gun9", ZooKind::Gun, "2 x g4", 90, 14),
    emitter("gun10", ZooKind::Gun, "g1 and g4", 143, 15),
    emitter("gun11", ZooKind::Gun, "2 x g1", 154, 24),
    emitter("gun12", ZooKind::Gun, "2 x g4 or g4", 176, 19),
];

pub const PUFFER_GUN: ZooRow = emitter("pg1", ZooKind::PufferGun, "g1 and o1", 70, 12);

/// Every reference row, gliders first.
pub fn all_rows() -> impl Iterator<Item = &'static ZooRow> {
    GLIDERS.iter().chain(&OSCILLATORS).chain(&PUFFERS).chain(&GUNS).chain(std::iter::once(&PUFFER_GUN))
}

pub fn row(name: &str) -> Option<&'static ZooRow> {
    all_rows().find(|r| r.name == name)
}

/// A builtin shape by name.
pub fn builtin(name: &str) -> Option<crate::pattern::Pattern> {
    let (_, text) = BUILTIN_RLE.iter().find(|(n, _)| *n == name)?;
    Some(crate::pattern::parse_rle(text).expect("builtin RLE is valid").0)
}

/// Shapes rediscovered by exhaustive search (box 6x6, at most 4 live cells).
/// g2 and g3 are mirror images; which of the two the tables call g2 is not
/// recoverable from the measurements alone.
pub const BUILTIN_RLE: [(&str, &str); 6] = [
    ("g1", "x = 4, y = 2, rule = B2/S7\no2bo$b2o!"),
    ("g2", "x = 4, y = 3, rule = B2/S7\no$3bo$b2o!"),
    ("g3", "x = 4, y = 3, rule = B2/S7\n3bo$o$b2o!"),
    ("g4", "x = 4, y = 3, rule = B2/S7\no2bo2$b2o!"),
    ("o1", "x = 2, y = 2, rule = B2/S7\no$bo!"),
    ("o2", "x = 3, y = 3, rule = B2/S7\no$2bo$bo!"),
];
