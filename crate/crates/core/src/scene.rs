//! JSON scene files.
//!
//! ```json
//! {
//!   "norm": {"kind": "lp", "p": 3},
//!   "world": {"kind": "box", "min": [-10, -10], "max": [10, 10]},
//!   "sites": [
//!     {"kind": "point", "at": [0, 0]},
//!     {"kind": "segment", "a": [1, 1], "b": [4, 2]}
//!   ],
//!   "rho": 12.5,
//!   "render": {"width": 600, "height": 600, "colors": ["#1b9e77"]}
//! }
//! ```
//!
//! Norms: `"euclidean"`, `"linf"`, `"l1"`, or `{"kind": "lp", "p": ..}`.
//! Worlds: `box`, `ball`, `simplex` (`vertices`), `halfspaces`, and
//! `unbounded` (`dim`). Sites: `point`, `points`, `segment`, `disc`, `box`,
//! `union` (`members`). Errors carry the JSON pointer of the offending value.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::sites::{Configuration, Site};
use crate::space::{Norm, NormedSpace};
use crate::vector::Point;
use crate::world::World;

#[derive(Debug, Clone, PartialEq)]
pub struct RenderSettings {
    pub width: u32,
    pub height: u32,
    /// Cell colors by site index, cycled.
    pub colors: Vec<String>,
}

impl Default for RenderSettings {
    fn default() -> Self {
        Self {
            width: 600,
            height: 600,
            colors: [
                "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
            ]
            .map(String::from)
            .to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub space: NormedSpace,
    pub world: World,
    pub sites: Vec<Site>,
    pub rho: Option<f64>,
    pub render: RenderSettings,
}

impl Scene {
    pub fn config(&self) -> Result<Configuration> {
        let c = Configuration::new(self.space, self.world.clone(), self.sites.clone())?;
        Ok(match self.rho {
            Some(r) => c.with_rho(r),
            None => c,
        })
    }

    pub fn from_config(config: &Configuration) -> Self {
        Self {
            space: config.space,
            world: config.world.clone(),
            sites: config.sites.clone(),
            rho: config.rho_override,
            render: RenderSettings::default(),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("norm".into(), norm_to_json(self.space.norm));
        obj.insert("world".into(), world_to_json(&self.world));
        obj.insert("sites".into(), Value::Array(self.sites.iter().map(site_to_json).collect()));
        if let Some(r) = self.rho {
            obj.insert("rho".into(), json!(r));
        }
        if self.render != RenderSettings::default() {
            obj.insert(
                "render".into(),
                json!({"width": self.render.width, "height": self.render.height, "colors": self.render.colors}),
            );
        }
        Value::Object(obj)
    }
}

/// Parses and validates a scene.
pub fn parse_scene(text: &str) -> Result<Scene> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::schema("", format!("invalid JSON: {e}")))?;
    scene_from_value(&root)
}

pub fn scene_from_value(root: &Value) -> Result<Scene> {
    let obj = root.as_object().ok_or_else(|| Error::schema("", "scene must be an object"))?;
    let norm = parse_norm(field(obj, "", "norm")?, "/norm")?;
    let world = parse_world(field(obj, "", "world")?, "/world")?;
    let dim = world.dim();
    let space = NormedSpace::new(norm, dim).map_err(|e| Error::schema("/norm", e.to_string()))?;
    world
        .validate(&space)
        .map_err(|e| Error::schema("/world", e.to_string()))?;
    let sites_val = field(obj, "", "sites")?
        .as_array()
        .ok_or_else(|| Error::schema("/sites", "expected an array"))?;
    if sites_val.len() < 2 {
        return Err(Error::schema("/sites", "need at least two sites"));
    }
    let mut sites = Vec::with_capacity(sites_val.len());
    for (i, v) in sites_val.iter().enumerate() {
        let path = format!("/sites/{i}");
        let site = parse_site(v, &path)?;
        site.validate(dim).map_err(|e| Error::schema(&path, e.to_string()))?;
        if !site.within(&world, &space) {
            return Err(Error::schema(&path, "site lies outside the world"));
        }
        sites.push(site);
    }
    let rho = match obj.get("rho") {
        None | Some(Value::Null) => None,
        Some(v) => {
            let r = number(v, "/rho")?;
            if !(r > 0.0) {
                return Err(Error::schema("/rho", "must be positive"));
            }
            Some(r)
        }
    };
    let render = match obj.get("render") {
        None | Some(Value::Null) => RenderSettings::default(),
        Some(v) => parse_render(v)?,
    };
    Ok(Scene {
        space,
        world,
        sites,
        rho,
        render,
    })
}

fn field<'a>(obj: &'a Map<String, Value>, base: &str, name: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| Error::schema(format!("{base}/{name}"), "missing field"))
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::schema(path, "expected an object"))
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::schema(path, "expected a finite number"))
}

fn vector(v: &Value, path: &str) -> Result<Point> {
    let arr = v.as_array().ok_or_else(|| Error::schema(path, "expected an array of numbers"))?;
    if arr.is_empty() {
        return Err(Error::schema(path, "empty vector"));
    }
    arr.iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("{path}/{i}")))
        .collect()
}

fn vectors(v: &Value, path: &str) -> Result<Vec<Point>> {
    let arr = v.as_array().ok_or_else(|| Error::schema(path, "expected an array of vectors"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| vector(x, &format!("{path}/{i}")))
        .collect()
}

fn kind<'a>(obj: &'a Map<String, Value>, path: &str) -> Result<&'a str> {
    field(obj, path, "kind")?
        .as_str()
        .ok_or_else(|| Error::schema(format!("{path}/kind"), "expected a string"))
}

fn get_vec(obj: &Map<String, Value>, path: &str, name: &str) -> Result<Point> {
    vector(field(obj, path, name)?, &format!("{path}/{name}"))
}

fn get_num(obj: &Map<String, Value>, path: &str, name: &str) -> Result<f64> {
    number(field(obj, path, name)?, &format!("{path}/{name}"))
}

fn parse_norm(v: &Value, path: &str) -> Result<Norm> {
    let named = |s: &str| match s {
        "euclidean" | "l2" => Ok(Norm::euclidean()),
        "linf" => Ok(Norm::Linf),
        "l1" => Ok(Norm::L1),
        other => Err(Error::schema(path, format!("unknown norm {other:?}"))),
    };
    match v {
        Value::String(s) => named(s),
        Value::Object(obj) => match kind(obj, path)? {
            "lp" => {
                let p = get_num(obj, path, "p")?;
                if !(p > 1.0) {
                    return Err(Error::schema(format!("{path}/p"), "p must exceed 1"));
                }
                Ok(Norm::Lp { p })
            }
            other => named(other),
        },
        _ => Err(Error::schema(path, "expected a string or an object")),
    }
}

fn parse_world(v: &Value, path: &str) -> Result<World> {
    let obj = object(v, path)?;
    let world = match kind(obj, path)? {
        "box" => {
            let min = get_vec(obj, path, "min")?;
            let max = get_vec(obj, path, "max")?;
            if min.len() != max.len() {
                return Err(Error::schema(format!("{path}/max"), "dimension differs from min"));
            }
            if min.iter().zip(&max).any(|(a, b)| a >= b) {
                return Err(Error::schema(format!("{path}/max"), "max must exceed min"));
            }
            World::Box { min, max }
        }
        "ball" => World::Ball {
            center: get_vec(obj, path, "center")?,
            radius: get_num(obj, path, "radius")?,
        },
        "simplex" => {
            let vs = vectors(field(obj, path, "vertices")?, &format!("{path}/vertices"))?;
            World::simplex(&vs).map_err(|e| Error::schema(format!("{path}/vertices"), e.to_string()))?
        }
        "halfspaces" => {
            let normals = vectors(field(obj, path, "normals")?, &format!("{path}/normals"))?;
            let offsets = field(obj, path, "offsets")?
                .as_array()
                .ok_or_else(|| Error::schema(format!("{path}/offsets"), "expected an array"))?
                .iter()
                .enumerate()
                .map(|(i, x)| number(x, &format!("{path}/offsets/{i}")))
                .collect::<Result<Vec<_>>>()?;
            if offsets.len() != normals.len() {
                return Err(Error::schema(format!("{path}/offsets"), "one offset per normal"));
            }
            let bounds = match obj.get("bounds") {
                None | Some(Value::Null) => None,
                Some(b) => {
                    let bo = object(b, &format!("{path}/bounds"))?;
                    let bp = format!("{path}/bounds");
                    Some((get_vec(bo, &bp, "min")?, get_vec(bo, &bp, "max")?))
                }
            };
            World::Halfspaces {
                normals,
                offsets,
                bounds,
            }
        }
        "unbounded" => {
            let dim = field(obj, path, "dim")?
                .as_u64()
                .filter(|&d| d > 0)
                .ok_or_else(|| Error::schema(format!("{path}/dim"), "expected a positive integer"))?;
            World::unbounded(dim as usize)
        }
        other => return Err(Error::schema(format!("{path}/kind"), format!("unknown world {other:?}"))),
    };
    Ok(world)
}

fn parse_site(v: &Value, path: &str) -> Result<Site> {
    let obj = object(v, path)?;
    Ok(match kind(obj, path)? {
        "point" => Site::point(get_vec(obj, path, "at")?),
        "points" => {
            let coords = vectors(field(obj, path, "coords")?, &format!("{path}/coords"))?;
            if coords.is_empty() {
                return Err(Error::schema(format!("{path}/coords"), "empty point set"));
            }
            Site::points(coords)
        }
        "segment" => Site::segment(get_vec(obj, path, "a")?, get_vec(obj, path, "b")?),
        "disc" => {
            let radius = get_num(obj, path, "radius")?;
            if radius < 0.0 {
                return Err(Error::schema(format!("{path}/radius"), "must be nonnegative"));
            }
            Site::disc(get_vec(obj, path, "center")?, radius)
        }
        "box" => Site::Box {
            min: get_vec(obj, path, "min")?,
            max: get_vec(obj, path, "max")?,
        },
        "union" => {
            let mp = format!("{path}/members");
            let arr = field(obj, path, "members")?
                .as_array()
                .filter(|a| !a.is_empty())
                .ok_or_else(|| Error::schema(&mp, "expected a nonempty array"))?;
            Site::Union {
                members: arr
                    .iter()
                    .enumerate()
                    .map(|(i, m)| parse_site(m, &format!("{mp}/{i}")))
                    .collect::<Result<_>>()?,
            }
        }
        other => return Err(Error::schema(format!("{path}/kind"), format!("unknown site {other:?}"))),
    })
}

fn parse_render(v: &Value) -> Result<RenderSettings> {
    let obj = object(v, "/render")?;
    let mut r = RenderSettings::default();
    let dim = |name: &str| -> Result<Option<u32>> {
        match obj.get(name) {
            None => Ok(None),
            Some(x) => x
                .as_u64()
                .filter(|&n| (16..=8192).contains(&n))
                .map(|n| Some(n as u32))
                .ok_or_else(|| Error::schema(format!("/render/{name}"), "expected an integer in 16..=8192")),
        }
    };
    if let Some(w) = dim("width")? {
        r.width = w;
    }
    if let Some(h) = dim("height")? {
        r.height = h;
    }
    if let Some(c) = obj.get("colors") {
        let arr = c
            .as_array()
            .filter(|a| !a.is_empty())
            .ok_or_else(|| Error::schema("/render/colors", "expected a nonempty array"))?;
        r.colors = arr
            .iter()
            .enumerate()
            .map(|(i, x)| {
                x.as_str()
                    .map(String::from)
                    .ok_or_else(|| Error::schema(format!("/render/colors/{i}"), "expected a string"))
            })
            .collect::<Result<_>>()?;
    }
    Ok(r)
}

fn norm_to_json(n: Norm) -> Value {
    match n {
        Norm::Lp { p } => json!({"kind": "lp", "p": p}),
        Norm::L1 => json!("l1"),
        Norm::Linf => json!("linf"),
    }
}

fn world_to_json(w: &World) -> Value {
    match w {
        World::Box { .. } if !w.is_bounded() => json!({"kind": "unbounded", "dim": w.dim()}),
        World::Box { min, max } => json!({"kind": "box", "min": min, "max": max}),
        World::Ball { center, radius } => json!({"kind": "ball", "center": center, "radius": radius}),
        World::Halfspaces {
            normals,
            offsets,
            bounds,
        } => {
            let mut v = json!({"kind": "halfspaces", "normals": normals, "offsets": offsets});
            if let Some((lo, hi)) = bounds {
                v["bounds"] = json!({"min": lo, "max": hi});
            }
            v
        }
    }
}

fn site_to_json(s: &Site) -> Value {
    match s {
        Site::Points { coords } if coords.len() == 1 => json!({"kind": "point", "at": coords[0]}),
        Site::Points { coords } => json!({"kind": "points", "coords": coords}),
        Site::Segment { a, b } => json!({"kind": "segment", "a": a, "b": b}),
        Site::Disc { center, radius } => json!({"kind": "disc", "center": center, "radius": radius}),
        Site::Box { min, max } => json!({"kind": "box", "min": min, "max": max}),
        Site::Union { members } => json!({"kind": "union", "members": members.iter().map(site_to_json).collect::<Vec<_>>()}),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG5: &str = r#"{
        "norm": "linf",
        "world": {"kind": "box", "min": [-10, -10], "max": [10, 10]},
        "sites": [
            {"kind": "point", "at": [0, 0]},
            {"kind": "point", "at": [2, 0]},
            {"kind": "point", "at": [-2, 0]},
            {"kind": "point", "at": [0, -2]}
        ]
    }"#;

    fn schema_path(e: Error) -> String {
        match e {
            Error::Schema { path, .. } => path,
            other => panic!("expected a schema error, got {other:?}"),
        }
    }

    #[test]
    fn fig5_round_trip() {
        let s = parse_scene(FIG5).unwrap();
        assert_eq!(s.sites.len(), 4);
        assert_eq!(s.space, NormedSpace::linf(2));
        let again = scene_from_value(&s.to_json()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn schema_paths() {
        assert_eq!(schema_path(parse_scene("{}").unwrap_err()), "/norm");
        let outside = FIG5.replace("[0, 0]", "[20, 0]");
        assert_eq!(schema_path(parse_scene(&outside).unwrap_err()), "/sites/0");
        let bad_p = FIG5.replace("\"linf\"", "{\"kind\": \"lp\", \"p\": 0.5}");
        assert_eq!(schema_path(parse_scene(&bad_p).unwrap_err()), "/norm/p");
        let bad_dim = FIG5.replace("[2, 0]", "[2, 0, 1]");
        assert_eq!(schema_path(parse_scene(&bad_dim).unwrap_err()), "/sites/1");
        assert_eq!(schema_path(parse_scene("[").unwrap_err()), "");
    }

    #[test]
    fn mixed_sites_round_trip() {
        let text = r##"{
            "norm": {"kind": "lp", "p": 3.14159},
            "world": {"kind": "simplex", "vertices": [[-10, -10], [10, -10], [0, 10]]},
            "sites": [
                {"kind": "points", "coords": [[0, 0], [1, -2]]},
                {"kind": "segment", "a": [-3, -5], "b": [3, -6]},
                {"kind": "disc", "center": [0, 4], "radius": 1},
                {"kind": "union", "members": [{"kind": "point", "at": [-4, -8]}, {"kind": "box", "min": [4, -8], "max": [5, -7]}]}
            ],
            "rho": 30,
            "render": {"width": 300, "colors": ["#000"]}
        }"##;
        let s = parse_scene(text).unwrap();
        assert_eq!(s.rho, Some(30.0));
        assert_eq!(s.render.width, 300);
        assert_eq!(s.render.height, 600);
        assert_eq!(scene_from_value(&s.to_json()).unwrap(), s);
        assert_eq!(s.config().unwrap().rho_override, Some(30.0));
    }

    #[test]
    fn unbounded_world_round_trip() {
        let text = r#"{"norm": "euclidean", "world": {"kind": "unbounded", "dim": 2},
            "sites": [{"kind": "point", "at": [0, 1]}, {"kind": "point", "at": [0, -1]}]}"#;
        let s = parse_scene(text).unwrap();
        assert!(!s.world.is_bounded());
        assert_eq!(scene_from_value(&s.to_json()).unwrap(), s);
    }
}
