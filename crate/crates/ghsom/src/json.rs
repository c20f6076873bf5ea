//! JSON documents. Reals are printed with 17 significant digits so every
//! value parses back to the same `f64`.

use std::io;
use std::path::Path;

use ghsom_core::ghsom::ExpansionReference;
use ghsom_core::som::{GridPos, SomMap, Unit};
use ghsom_core::{GhsomParams, GhsomTree};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{FormatError, Result};
use crate::fsx;

/// Pretty printing with reals in `d.dddddddddddddddde±x` form.
struct Exact<'a>(PrettyFormatter<'a>);

impl Formatter for Exact<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// Serializes `value` with exact reals and a trailing newline.
pub fn to_bytes<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Exact(PrettyFormatter::with_indent(b"  ")));
    value.serialize(&mut ser).expect("documents contain only serializable data");
    out.push(b'\n');
    out
}

pub fn write<T: Serialize + ?Sized>(value: &T, path: &Path) -> Result<()> {
    fsx::write_atomic(path, &to_bytes(value))
}

pub fn read<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fsx::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|source| FormatError::Json { path: path.to_path_buf(), source })
}

/// Finite reals as numbers, others as the strings `inf`, `-inf` or `nan`.
pub fn real<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(&v.to_string())
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceDoc {
    Layer0,
    ParentUnit,
}

impl From<ExpansionReference> for ReferenceDoc {
    fn from(r: ExpansionReference) -> Self {
        match r {
            ExpansionReference::Layer0 => ReferenceDoc::Layer0,
            ExpansionReference::ParentUnit => ReferenceDoc::ParentUnit,
        }
    }
}

impl From<ReferenceDoc> for ExpansionReference {
    fn from(r: ReferenceDoc) -> Self {
        match r {
            ReferenceDoc::Layer0 => ExpansionReference::Layer0,
            ReferenceDoc::ParentUnit => ExpansionReference::ParentUnit,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ParamsDoc {
    pub tau1: f64,
    pub tau2: f64,
    pub lambda: usize,
    pub alpha0: f64,
    pub sigma0: Option<f64>,
    pub max_depth: usize,
    pub seed: u64,
    pub expansion_reference: ReferenceDoc,
}

impl From<&GhsomParams> for ParamsDoc {
    fn from(p: &GhsomParams) -> Self {
        ParamsDoc {
            tau1: p.tau1,
            tau2: p.tau2,
            lambda: p.lambda,
            alpha0: p.alpha0,
            sigma0: p.sigma0,
            max_depth: p.max_depth,
            seed: p.seed,
            expansion_reference: p.expansion_reference.into(),
        }
    }
}

impl From<&ParamsDoc> for GhsomParams {
    fn from(p: &ParamsDoc) -> Self {
        GhsomParams {
            tau1: p.tau1,
            tau2: p.tau2,
            lambda: p.lambda,
            alpha0: p.alpha0,
            sigma0: p.sigma0,
            max_depth: p.max_depth,
            seed: p.seed,
            expansion_reference: p.expansion_reference.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct UnitDoc {
    pub col: usize,
    pub row: usize,
    pub weight: Vec<f64>,
    pub mqe: f64,
    /// Sample ids, in assignment order.
    pub assigned: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub child: Option<Box<MapDoc>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MapDoc {
    pub rows: usize,
    pub cols: usize,
    pub depth: usize,
    pub parent_mqe: f64,
    /// Row-major.
    pub units: Vec<UnitDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TreeDoc {
    pub params: ParamsDoc,
    pub attribute_names: Vec<String>,
    pub sample_ids: Vec<String>,
    pub w0: Vec<f64>,
    pub mqe0: f64,
    pub root: MapDoc,
}

fn map_doc(map: &SomMap, ids: &[String]) -> MapDoc {
    MapDoc {
        rows: map.rows,
        cols: map.cols,
        depth: map.depth,
        parent_mqe: map.parent_mqe,
        units: map
            .units
            .iter()
            .map(|u| UnitDoc {
                col: u.pos.col,
                row: u.pos.row,
                weight: u.weight.clone(),
                mqe: u.mqe,
                assigned: u.assigned.iter().map(|&i| ids[i].clone()).collect(),
                child: u.child.as_ref().map(|c| Box::new(map_doc(c, ids))),
            })
            .collect(),
    }
}

impl From<&GhsomTree> for TreeDoc {
    fn from(t: &GhsomTree) -> Self {
        TreeDoc {
            params: (&t.params).into(),
            attribute_names: t.attribute_names.clone(),
            sample_ids: t.sample_ids.clone(),
            w0: t.w0.clone(),
            mqe0: t.mqe0,
            root: map_doc(&t.root, &t.sample_ids),
        }
    }
}

fn som_map(doc: &MapDoc, index: &std::collections::HashMap<&str, usize>) -> std::result::Result<SomMap, String> {
    if doc.units.len() != doc.rows * doc.cols {
        return Err(format!("map with {}x{} grid lists {} units", doc.rows, doc.cols, doc.units.len()));
    }
    let mut units = Vec::with_capacity(doc.units.len());
    for (i, u) in doc.units.iter().enumerate() {
        let pos = GridPos::new(u.col, u.row);
        if pos != GridPos::new(i % doc.cols, i / doc.cols) {
            return Err(format!("unit {pos} is out of row-major order"));
        }
        let assigned = u
            .assigned
            .iter()
            .map(|id| index.get(id.as_str()).copied().ok_or_else(|| format!("unknown sample id '{id}'")))
            .collect::<std::result::Result<_, _>>()?;
        let child = u.child.as_ref().map(|c| som_map(c, index).map(Box::new)).transpose()?;
        units.push(Unit { weight: u.weight.clone(), pos, assigned, mqe: u.mqe, child });
    }
    Ok(SomMap { rows: doc.rows, cols: doc.cols, units, parent_mqe: doc.parent_mqe, depth: doc.depth })
}

impl TreeDoc {
    pub fn to_tree(&self) -> std::result::Result<GhsomTree, String> {
        let index = self.sample_ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        Ok(GhsomTree {
            w0: self.w0.clone(),
            mqe0: self.mqe0,
            root: som_map(&self.root, &index)?,
            params: (&self.params).into(),
            sample_ids: self.sample_ids.clone(),
            attribute_names: self.attribute_names.clone(),
        })
    }
}

pub fn write_tree(tree: &GhsomTree, path: &Path) -> Result<()> {
    write(&TreeDoc::from(tree), path)
}

pub fn tree_bytes(tree: &GhsomTree) -> Vec<u8> {
    to_bytes(&TreeDoc::from(tree))
}

pub fn read_tree(path: &Path) -> Result<GhsomTree> {
    let doc: TreeDoc = read(path)?;
    doc.to_tree().map_err(|reason| FormatError::Invalid { path: path.to_path_buf(), reason })
}
