//! Readers and writers for World Color Survey style files, and estimation of
//! per-language naming distributions q_l(w|c).
//!
//! File layouts (all tab-separated):
//!
//! * chip table: `chip_id  row  col  munsell`, no header, 330 rows
//! * lab table: one header row naming `#cnum`; L*, a*, b* are the last three
//!   columns
//! * term file: `language_id  speaker_id  chip_id  term`, no header

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::io::BufRead;

use ndarray::Array2;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ib::{Encoder, Prior};
use crate::meaning_space::{ColorChip, GridPos, Lab, Palette};

pub const WCS_CHIP_COUNT: usize = 330;
/// Language id given to the English data set.
pub const ENGLISH_LANGUAGE_ID: u32 = 111;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn fields(line: &str) -> Vec<&str> {
    let tabbed: Vec<&str> = line.split('\t').map(str::trim).collect();
    if tabbed.len() > 1 {
        tabbed
    } else {
        line.split_whitespace().collect()
    }
}

/// A chip's identity and grid position, before CIELAB is attached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChipCell {
    pub chip_id: u32,
    pub grid: GridPos,
    pub munsell: String,
}

/// Parse a chip table, which must hold exactly 330 chips.
pub fn parse_chip_table(reader: impl BufRead) -> Result<Vec<ChipCell>> {
    let cells = parse_chip_rows(reader)?;
    if cells.len() != WCS_CHIP_COUNT {
        return Err(Error::ParseFile(format!(
            "expected {WCS_CHIP_COUNT} chips, found {}",
            cells.len()
        )));
    }
    Ok(cells)
}

/// Parse a chip table of any nonzero size.
pub fn parse_chip_rows(reader: impl BufRead) -> Result<Vec<ChipCell>> {
    let mut cells = Vec::new();
    let mut seen_ids = HashSet::new();
    let mut seen_cells = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f = fields(&line);
        if f.len() < 3 {
            return Err(parse_err(
                lineno,
                format!("expected at least 3 fields, got {}", f.len()),
            ));
        }
        let chip_id: u32 = f[0]
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad chip id {:?}", f[0])))?;
        let mut row_chars = f[1].chars();
        let row = match (row_chars.next(), row_chars.next()) {
            (Some(c), None) => c.to_ascii_uppercase(),
            _ => return Err(parse_err(lineno, format!("bad grid row {:?}", f[1]))),
        };
        let col: u8 = f[2]
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad grid column {:?}", f[2])))?;
        let grid = GridPos { row, col };
        if !grid.is_valid() {
            return Err(parse_err(
                lineno,
                format!("grid position {row}{col} is not on the stimulus grid"),
            ));
        }
        if !seen_ids.insert(chip_id) {
            return Err(parse_err(lineno, format!("duplicate chip {chip_id}")));
        }
        if !seen_cells.insert(grid) {
            return Err(parse_err(lineno, format!("duplicate grid position {row}{col}")));
        }
        cells.push(ChipCell {
            chip_id,
            grid,
            munsell: f.get(3).map(|s| s.to_string()).unwrap_or_default(),
        });
    }
    if cells.is_empty() {
        return Err(Error::ParseFile("no rows".into()));
    }
    cells.sort_by_key(|c| c.chip_id);
    Ok(cells)
}

/// Parse a lab table that must cover chip ids 1..=330 exactly once.
pub fn parse_lab_table(reader: impl BufRead) -> Result<BTreeMap<u32, Lab>> {
    let map = parse_lab_rows(reader)?;
    let missing: Vec<u32> = (1..=WCS_CHIP_COUNT as u32).filter(|id| !map.contains_key(id)).collect();
    if !missing.is_empty() {
        return Err(Error::ParseFile(format!("lab table is missing chips {missing:?}")));
    }
    if map.len() != WCS_CHIP_COUNT {
        return Err(Error::ParseFile(format!(
            "lab table has {} chips, expected {WCS_CHIP_COUNT}",
            map.len()
        )));
    }
    Ok(map)
}

/// Parse a lab table of any nonzero size.
pub fn parse_lab_rows(reader: impl BufRead) -> Result<BTreeMap<u32, Lab>> {
    let mut lines = reader.lines().enumerate();
    let id_col = loop {
        match lines.next() {
            None => return Err(Error::ParseFile("no header row".into())),
            Some((_, line)) => {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                break fields(&line)
                    .iter()
                    .position(|h| h.eq_ignore_ascii_case("#cnum"))
                    .unwrap_or(0);
            }
        }
    };
    let mut map = BTreeMap::new();
    for (i, line) in lines {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f = fields(&line);
        if f.len() < 4 || id_col >= f.len() {
            return Err(parse_err(
                lineno,
                format!("expected chip id and three coordinates, got {} fields", f.len()),
            ));
        }
        let chip_id: u32 = f[id_col]
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad chip id {:?}", f[id_col])))?;
        let n = f.len();
        let mut coords = [0.0; 3];
        for (k, raw) in f[n - 3..].iter().enumerate() {
            coords[k] = raw
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(lineno, format!("non-numeric coordinate {raw:?}")))?;
        }
        if map.insert(chip_id, Lab::new(coords[0], coords[1], coords[2])).is_some() {
            return Err(parse_err(lineno, format!("duplicate chip {chip_id}")));
        }
    }
    if map.is_empty() {
        return Err(Error::ParseFile("no data rows".into()));
    }
    Ok(map)
}

/// Attach CIELAB coordinates to grid cells.
pub fn assemble_palette(cells: &[ChipCell], labs: &BTreeMap<u32, Lab>) -> Result<Palette> {
    let mut chips = Vec::with_capacity(cells.len());
    for cell in cells {
        let lab = labs
            .get(&cell.chip_id)
            .ok_or_else(|| Error::ParseFile(format!("chip {} has no CIELAB entry", cell.chip_id)))?;
        chips.push(ColorChip {
            chip_id: cell.chip_id,
            grid: cell.grid,
            lab: *lab,
        });
    }
    Palette::new(chips)
}

pub fn write_chip_table(palette: &Palette) -> String {
    let mut s = String::new();
    for c in palette.chips() {
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}{}",
            c.chip_id, c.grid.row, c.grid.col, c.grid.row, c.grid.col
        );
    }
    s
}

/// Lab table in the survey layout. Coordinates use shortest round-trip
/// formatting, so parsing the output reproduces the input exactly.
pub fn write_lab_table(labs: &BTreeMap<u32, Lab>) -> String {
    let mut s = String::from("#cnum\tL*\ta*\tb*\n");
    for (id, lab) in labs {
        let _ = writeln!(s, "{id}\t{:?}\t{:?}\t{:?}", lab.l, lab.a, lab.b);
    }
    s
}

pub fn palette_labs(palette: &Palette) -> BTreeMap<u32, Lab> {
    palette.chips().iter().map(|c| (c.chip_id, c.lab)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamingObservation {
    pub language_id: u32,
    pub speaker_id: u32,
    pub chip_id: u32,
    pub term: String,
}

#[derive(Debug, Clone, Default)]
pub struct TermFile {
    pub observations: Vec<NamingObservation>,
    /// Rows dropped because the term was blank.
    pub skipped_blank: usize,
}

/// Parse a term file. Chip ids must lie in 1..=330.
pub fn parse_term_file(reader: impl BufRead) -> Result<TermFile> {
    parse_term_rows(reader, WCS_CHIP_COUNT as u32)
}

pub fn parse_term_rows(reader: impl BufRead, max_chip: u32) -> Result<TermFile> {
    let mut out = TermFile::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() < 3 {
            return Err(parse_err(lineno, format!("expected 4 fields, got {}", f.len())));
        }
        let num = |k: usize, what: &str| -> Result<u32> {
            f[k].trim()
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad {what} {:?}", f[k])))
        };
        let language_id = num(0, "language id")?;
        let speaker_id = num(1, "speaker id")?;
        let chip_id = num(2, "chip id")?;
        if chip_id == 0 || chip_id > max_chip {
            return Err(parse_err(lineno, format!("chip id {chip_id} outside 1..={max_chip}")));
        }
        let term = normalize_term(f.get(3).copied().unwrap_or(""));
        if term.is_empty() {
            out.skipped_blank += 1;
            continue;
        }
        out.observations.push(NamingObservation {
            language_id,
            speaker_id,
            chip_id,
            term,
        });
    }
    Ok(out)
}

pub fn normalize_term(raw: &str) -> String {
    raw.trim().to_lowercase()
}

pub fn write_term_file(observations: &[NamingObservation]) -> String {
    let mut s = String::new();
    for o in observations {
        let _ = writeln!(s, "{}\t{}\t{}\t{}", o.language_id, o.speaker_id, o.chip_id, o.term);
    }
    s
}

/// Re-label every observation with `language_id` (used for English data).
pub fn relabel_language(observations: &mut [NamingObservation], language_id: u32) {
    for o in observations {
        o.language_id = language_id;
    }
}

pub fn group_by_language(observations: &[NamingObservation]) -> BTreeMap<u32, Vec<NamingObservation>> {
    let mut map: BTreeMap<u32, Vec<NamingObservation>> = BTreeMap::new();
    for o in observations {
        map.entry(o.language_id).or_default().push(o.clone());
    }
    map
}

/// Empirical naming distribution of one language over a palette.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageEncoder {
    pub language_id: u32,
    pub terms: Vec<String>,
    #[serde(serialize_with = "ser_matrix", deserialize_with = "de_matrix")]
    pub matrix: Array2<f64>,
}

pub(crate) fn ser_matrix<S: Serializer>(m: &Array2<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::Error as _;
    use serde_json::value::RawValue;
    let rows: std::result::Result<Vec<Vec<Box<RawValue>>>, _> = m
        .rows()
        .into_iter()
        .map(|r| r.iter().map(|v| RawValue::from_string(format!("{v:.16e}"))).collect())
        .collect();
    rows.map_err(S::Error::custom)?.serialize(s)
}

pub(crate) fn de_matrix<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Array2<f64>, D::Error> {
    use serde::de::Error as _;
    let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
    let n = rows.len();
    let k = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != k) {
        return Err(D::Error::custom("ragged matrix"));
    }
    Array2::from_shape_vec((n, k), rows.into_iter().flatten().collect()).map_err(D::Error::custom)
}

impl LanguageEncoder {
    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn to_encoder(&self, prior: &Prior) -> Result<Encoder> {
        Encoder::new(self.matrix.clone(), prior)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// q_l(w|c) = count(c, w) / count(c). Terms are ordered by first appearance.
pub fn estimate_encoder(
    language_id: u32,
    observations: &[NamingObservation],
    palette: &Palette,
) -> Result<LanguageEncoder> {
    let mut term_index: HashMap<&str, usize> = HashMap::new();
    let mut terms: Vec<String> = Vec::new();
    let mut counts: Vec<HashMap<usize, u64>> = vec![HashMap::new(); palette.len()];
    for o in observations.iter().filter(|o| o.language_id == language_id) {
        let row = palette
            .index_of(o.chip_id)
            .ok_or_else(|| Error::InvalidArgument(format!("chip {} is not in the palette", o.chip_id)))?;
        let w = *term_index.entry(o.term.as_str()).or_insert_with(|| {
            terms.push(o.term.clone());
            terms.len() - 1
        });
        *counts[row].entry(w).or_default() += 1;
    }
    let uncovered: Vec<u32> = counts
        .iter()
        .zip(palette.chips())
        .filter(|(c, _)| c.is_empty())
        .map(|(_, chip)| chip.chip_id)
        .collect();
    if !uncovered.is_empty() {
        return Err(Error::UncoveredChips {
            language_id,
            chips: uncovered,
        });
    }
    let mut matrix = Array2::zeros((palette.len(), terms.len()));
    for (row, c) in counts.iter().enumerate() {
        let total: u64 = c.values().sum();
        for (&w, &n) in c {
            matrix[[row, w]] = n as f64 / total as f64;
        }
    }
    Ok(LanguageEncoder {
        language_id,
        terms,
        matrix,
    })
}

/// Modal term index per chip, in palette order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeMap {
    pub assignment: Vec<usize>,
}

impl ModeMap {
    pub fn categories(&self) -> BTreeSet<usize> {
        self.assignment.iter().copied().collect()
    }
}

/// Per-chip argmax; ties go to the lowest term index.
pub fn mode_map(matrix: &Array2<f64>) -> ModeMap {
    let assignment = matrix
        .rows()
        .into_iter()
        .map(|row| {
            let mut best = 0;
            for (w, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = w;
                }
            }
            best
        })
        .collect();
    ModeMap { assignment }
}

/// Number of terms that are modal for at least one chip.
pub fn frequent_term_count(matrix: &Array2<f64>) -> usize {
    mode_map(matrix).categories().len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::wcs_layout_palette;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn obs(lang: u32, speaker: u32, chip: u32, term: &str) -> NamingObservation {
        NamingObservation {
            language_id: lang,
            speaker_id: speaker,
            chip_id: chip,
            term: term.into(),
        }
    }

    fn toy_palette() -> Palette {
        Palette::new(
            (1..=3)
                .map(|i| ColorChip {
                    chip_id: i,
                    grid: GridPos {
                        row: (b'A' + i as u8) as char,
                        col: 0,
                    },
                    lab: Lab::new(10.0 * i as f64, 0.0, 0.0),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn chip_table_round_trip() {
        let p = wcs_layout_palette();
        let cells = parse_chip_table(write_chip_table(&p).as_bytes()).unwrap();
        assert_eq!(cells.len(), 330);
        assert_eq!(cells[0].chip_id, 1);
    }

    #[test]
    fn chip_table_errors() {
        assert!(matches!(parse_chip_table("".as_bytes()), Err(Error::ParseFile(m)) if m == "no rows"));
        let mut text = write_chip_table(&wcs_layout_palette());
        text.push_str("17\tC\t5\tC5\n");
        match parse_chip_table(text.as_bytes()) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 331);
                assert!(msg.contains("17"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_chip_table("1\tA\t0\tA0\n".as_bytes()),
            Err(Error::ParseFile(_))
        ));
        assert!(matches!(
            parse_chip_rows("1\tA\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(parse_chip_rows("1\tA\t7\tA7\n".as_bytes()).is_err());
    }

    #[test]
    fn lab_table_round_trip_and_errors() {
        let labs = palette_labs(&wcs_layout_palette());
        let text = write_lab_table(&labs);
        assert_eq!(parse_lab_table(text.as_bytes()).unwrap(), labs);
        assert!(matches!(
            parse_lab_table("#cnum\tL*\ta*\tb*\n".as_bytes()),
            Err(Error::ParseFile(m)) if m == "no data rows"
        ));
        let truncated: String = text.lines().take(300).map(|l| format!("{l}\n")).collect();
        assert!(parse_lab_table(truncated.as_bytes()).is_err());
        assert!(matches!(
            parse_lab_rows("#cnum\tV\tH\tL*\ta*\tb*\n5\t1\t2\t50\tx\t3\n".as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn lab_table_uses_last_three_columns() {
        let text = "#cnum\tV\tH\tC\tMunH\tMunV\tL*\ta*\tb*\n141\t9\t7\t2\t10R\t9.5\t96.00\t-.06\t.06\n";
        let map = parse_lab_rows(text.as_bytes()).unwrap();
        assert_eq!(map[&141], Lab::new(96.0, -0.06, 0.06));
    }

    #[test]
    fn term_file_parsing() {
        let text = "1\t1\t1\tLF\n1\t1\t2\tLB\n1\t2\t1\tLF\n1\t2\t2\t  \n1\t2\t3\tlb \n";
        let tf = parse_term_file(text.as_bytes()).unwrap();
        assert_eq!(tf.observations.len(), 4);
        assert_eq!(tf.skipped_blank, 1);
        assert_eq!(tf.observations[3].term, "lb");
        match parse_term_file("1\t1\t331\tX\n".as_bytes()) {
            Err(Error::Parse { line: 1, msg }) => assert!(msg.contains("331")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn encoder_by_hand_tally() {
        let p = toy_palette();
        // 3 speakers, 3 chips, terms a/b
        let o = vec![
            obs(1, 1, 1, "a"),
            obs(1, 2, 1, "a"),
            obs(1, 3, 1, "b"),
            obs(1, 1, 2, "b"),
            obs(1, 2, 2, "b"),
            obs(1, 3, 2, "b"),
            obs(1, 1, 3, "a"),
            obs(1, 2, 3, "b"),
            obs(1, 3, 3, "a"),
        ];
        let e = estimate_encoder(1, &o, &p).unwrap();
        assert_eq!(e.terms, vec!["a", "b"]);
        let want = array![[2.0 / 3.0, 1.0 / 3.0], [0.0, 1.0], [2.0 / 3.0, 1.0 / 3.0]];
        for (a, b) in e.matrix.iter().zip(want.iter()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-15);
        }
    }

    #[test]
    fn split_and_unanimous_rows() {
        let p = toy_palette();
        let o = vec![
            obs(1, 1, 1, "a"),
            obs(1, 2, 1, "a"),
            obs(1, 1, 2, "a"),
            obs(1, 2, 2, "b"),
            obs(1, 1, 3, "b"),
            obs(1, 2, 3, "b"),
        ];
        let e = estimate_encoder(1, &o, &p).unwrap();
        assert_eq!(e.matrix.row(0).to_vec(), vec![1.0, 0.0]);
        assert_eq!(e.matrix.row(1).to_vec(), vec![0.5, 0.5]);
        assert_eq!(mode_map(&e.matrix).assignment, vec![0, 0, 1]);
    }

    #[test]
    fn uncovered_chips_listed() {
        let p = toy_palette();
        let o = vec![obs(4, 1, 1, "a"), obs(4, 1, 3, "a")];
        match estimate_encoder(4, &o, &p) {
            Err(Error::UncoveredChips { language_id, chips }) => {
                assert_eq!(language_id, 4);
                assert_eq!(chips, vec![2]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn frequent_terms() {
        let det = array![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]];
        assert_eq!(frequent_term_count(&det), 3);
        let shadow = array![[0.6, 0.0, 0.4], [0.0, 0.7, 0.3], [0.5, 0.2, 0.3]];
        assert_eq!(frequent_term_count(&shadow), 2);
    }

    #[test]
    fn json_keeps_every_bit() {
        let e = LanguageEncoder {
            language_id: 3,
            terms: vec!["x".into(), "y".into()],
            matrix: array![[1.0 / 3.0, 2.0 / 3.0], [0.1, 0.9]],
        };
        let text = e.to_json().unwrap();
        assert!(text.contains("3.3333333333333331e-1"), "{text}");
        assert_eq!(LanguageEncoder::from_json(&text).unwrap(), e);
    }
}
