use std::fmt::Write as _;
use std::path::Path;

use polargeo::mesh::Mesh;

use crate::exit::{CliError, Code};
use crate::output::{write_atomic, Outcome};
use crate::verify::load_mesh;

pub fn parse_coords(s: &str, dim: usize) -> Result<[usize; 3], CliError> {
    let v: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| CliError::new(Code::Usage, format!("bad coordinate index `{t}`"))))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [i, j, k] if i < dim && j < dim && k < dim => Ok([i, j, k]),
        _ => Err(CliError::new(Code::Usage, format!("--coords needs three indices below {dim}"))),
    }
}

/// Projection to three coordinates as a plain Wavefront OBJ.
pub fn to_obj3(mesh: &Mesh, c: [usize; 3]) -> String {
    let mut s = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(s, "v {} {} {}", v[c[0]], v[c[1]], v[c[2]]);
    }
    for l in &mesh.lines {
        let _ = writeln!(s, "l {} {}", l[0] + 1, l[1] + 1);
    }
    for f in &mesh.faces {
        let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    s
}

pub fn to_csv(mesh: &Mesh) -> String {
    let n = mesh.ambient_dim;
    let mut cols: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    cols.extend((0..n).map(|i| format!("n{i}")));
    cols.push("group".into());
    cols.push("profile".into());
    let mut s = cols.join(",");
    s.push('\n');
    for (i, v) in mesh.vertices.iter().enumerate() {
        let row: Vec<String> = v.iter().chain(mesh.normals[i].iter()).map(|x| x.to_string()).collect();
        let _ = writeln!(s, "{},{},{}", row.join(","), mesh.group_tags[i], mesh.profile_tags[i]);
    }
    s
}

pub fn export(mesh_path: &Path, format: &str, coords: Option<&str>, out: &Path, o: &mut Outcome) -> Result<(), CliError> {
    let mesh = load_mesh(mesh_path)?;
    let (name, text) = match format {
        "obj3" => {
            if mesh.ambient_dim < 3 {
                return Err(CliError::new(Code::Usage, "obj3 export needs ambient dimension at least 3"));
            }
            let c = parse_coords(coords.unwrap_or("0,1,2"), mesh.ambient_dim)?;
            o.kv("coords", format!("{},{},{}", c[0], c[1], c[2]));
            ("export.obj", to_obj3(&mesh, c))
        }
        "csv" => ("export.csv", to_csv(&mesh)),
        other => return Err(CliError::new(Code::Usage, format!("unknown export format `{other}`"))),
    };
    write_atomic(&out.join(name), &text)?;
    o.section("export");
    o.kv("format", format);
    o.kv("vertices", mesh.vertices.len());
    o.kv("file", name);
    Ok(())
}
