use std::fs;
use std::path::Path;

use drum_core::geometry::{Boundary, ShapeSpec};
use serde::Serialize;

use crate::Failure;

#[derive(Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub spec: ShapeSpec,
}

pub fn presets() -> Vec<Preset> {
    vec![
        Preset {
            name: "disk",
            description: "unit disk",
            spec: ShapeSpec::disk(1.0),
        },
        Preset {
            name: "ellipse",
            description: "ellipse with semi-axes e^0.4 and e^-0.4",
            spec: ShapeSpec::Ellipse {
                a: 0.4f64.exp(),
                b: (-0.4f64).exp(),
            },
        },
        Preset {
            name: "nonsymmetric",
            description: "radial r(t) = 1 + 0.2 cos 3t + 0.3 sin 2t",
            spec: ShapeSpec::nonsymmetric(),
        },
        Preset {
            name: "crescent",
            description: "r(s) = 0.2/(1 + exp(4(s - 3pi/2)(s - pi/2))) + 0.4, theta(s) = -(49/50) pi sin s",
            spec: ShapeSpec::Crescent,
        },
        Preset {
            name: "annulus",
            description: "circular annulus, radii 1 and 0.4",
            spec: ShapeSpec::Annulus {
                outer: Box::new(ShapeSpec::disk(1.0)),
                inner: Box::new(ShapeSpec::disk(0.4)),
            },
        },
        Preset {
            name: "nonsymmetric-annulus",
            description: "nonsymmetric outer curve with a scaled nonsymmetric hole",
            spec: ShapeSpec::nonsymmetric_annulus(),
        },
    ]
}

/// A preset name, inline JSON, or a path to a JSON file.
pub fn load(arg: &str) -> Result<(ShapeSpec, Boundary), Failure> {
    let text = arg.trim();
    let spec = if let Some(p) = presets().into_iter().find(|p| p.name == text) {
        p.spec
    } else if text.starts_with('{') {
        serde_json::from_str(text).map_err(|e| Failure::Shape(format!("bad shape JSON: {e}")))?
    } else {
        let path = Path::new(text);
        let body = fs::read_to_string(path)
            .map_err(|e| Failure::Shape(format!("cannot read shape file {}: {e}", path.display())))?;
        serde_json::from_str(&body).map_err(|e| Failure::Shape(format!("bad shape JSON in {}: {e}", path.display())))?
    };
    let boundary = spec.build().map_err(|e| Failure::Shape(e.to_string()))?;
    Ok((spec, boundary))
}

pub fn listing_text() -> String {
    let mut out = String::from(
        "shape types (JSON, tagged by \"type\"):\n\
         \x20 radial    {\"type\":\"radial\",\"a0\":A,\"cos\":[c1,..],\"sin\":[s1,..]}  r = a0 + sum cj cos jt + sj sin jt\n\
         \x20 ellipse   {\"type\":\"ellipse\",\"a\":A,\"b\":B}\n\
         \x20 crescent  {\"type\":\"crescent\"}\n\
         \x20 annulus   {\"type\":\"annulus\",\"outer\":SHAPE,\"inner\":SHAPE}\n\
         \npresets (usable by name with --shape):\n",
    );
    for p in presets() {
        out.push_str(&format!(
            "  {:<21} {}\n  {:<21} {}\n",
            p.name,
            p.description,
            "",
            serde_json::to_string(&p.spec).expect("shape serializes")
        ));
    }
    out
}
