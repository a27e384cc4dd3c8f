//! Command line front end: `cosine-puzzle <command> [flags]`.
//!
//! Exit codes: 0 success, 2 bad input or unmet precondition, 3 failed
//! numerical certification.

mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use cosine_puzzle::basins::{classify_critical_orbit, BasinChart, ChartMode, CriticalValue, OrbitKind};
use cosine_puzzle::export::{self, RayRecord};
use cosine_puzzle::puzzle::{
    bounded_modification, build_graph, detect_renormalization, ellipse_curve, ellipse_semi_axes, find_graph, tableau,
    Curve, CurveTag, GraphSpec, ModifiedPuzzle, PuzzleGraph, PuzzlePiece,
};
use cosine_puzzle::rays::{land_ray, trace_ray, DEFAULT_DEPTH};
use cosine_puzzle::render::{
    classify_viewport, compare_resolutions, component_report, overlay, OverlayObject, PixelClass, Tag, Viewport,
    DEFAULT_EPS, PALETTE_VERSION,
};
use cosine_puzzle::renorm::renorm_domain;
use cosine_puzzle::scan::{best_hit, scan, ScanTarget, Slice};
use cosine_puzzle::{Address, CosineMap, Error, Result};

#[derive(Parser)]
#[command(name = "cosine-puzzle", version, about = "Rays, puzzles and renormalization for f(z) = a e^z + b e^-z")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Escape-time picture of the Julia set (PPM), optionally with a ray.
    Render,
    /// Trace the dynamic ray --address on [--t-min, --t-max].
    TraceRay,
    /// Land the periodic ray --address.
    Land,
    /// Build the puzzle graph (internal ray + dynamic ray + equipotential).
    Graph,
    /// Puzzle pieces around the critical point to --depth.
    Puzzle,
    /// Tableau of the critical point as CSV.
    Tableau,
    /// Renormalization from a periodic critical tableau.
    RenormTableau,
    /// Renormalization when -v escapes.
    RenormEscape,
    /// Spherical diameters of attracted components.
    Diameters,
    /// Search a parameter segment for a critical behaviour.
    Scan,
}

fn complex(s: &str) -> std::result::Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |x: &str| x.parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected re,im but got {s:?}")),
    }
}

fn viewport_arg(s: &str) -> std::result::Result<(f64, f64, f64), String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match v.as_slice() {
        [cx, cy, w] => Ok((*cx, *cy, *w)),
        _ => Err(format!("expected cx,cy,w but got {s:?}")),
    }
}

fn px_arg(s: &str) -> std::result::Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected WxH but got {s:?}"))?;
    let n = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok((n(w)?, n(h)?))
}

fn target_arg(s: &str) -> std::result::Result<ScanTarget, String> {
    match s {
        "escaping" => Ok(ScanTarget::EscapingValue),
        _ => s
            .strip_prefix("period:")
            .and_then(|p| p.parse().ok())
            .map(|period| ScanTarget::AttractedMinus { period })
            .ok_or_else(|| format!("target is `escaping` or `period:N`, got {s:?}")),
    }
}

fn parse_as<T: std::str::FromStr>(s: &str) -> std::result::Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e: T::Err| format!("{s:?}: {e}"))
}

#[derive(Args, Default)]
struct Opts {
    /// Key = value file with any of the flags below; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Coefficient a as "re,im".
    #[arg(long, global = true, value_parser = complex, allow_hyphen_values = true)]
    a: Option<Complex64>,
    /// Coefficient b as "re,im".
    #[arg(long, global = true, value_parser = complex, allow_hyphen_values = true)]
    b: Option<Complex64>,
    /// Normal form f = v cosh(z - u): u as "re,im".
    #[arg(long, global = true, value_parser = complex, allow_hyphen_values = true)]
    u: Option<Complex64>,
    /// Normal form: v as "re,im".
    #[arg(long, global = true, value_parser = complex, allow_hyphen_values = true)]
    v: Option<Complex64>,
    /// Address "[(j,k) ...];[(j,k) ...]" (preperiod;period).
    #[arg(long, global = true, allow_hyphen_values = true)]
    address: Option<String>,
    /// Pullback depth for rays, puzzle depth for pieces and tableaux.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// cx,cy,w
    #[arg(long, global = true, value_parser = viewport_arg, allow_hyphen_values = true)]
    viewport: Option<(f64, f64, f64)>,
    /// WxH
    #[arg(long, global = true, value_parser = px_arg)]
    px: Option<(usize, usize)>,
    /// Image (PPM) or CSV output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON output (stdout when absent).
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Puzzle sample resolution; for `diameters --compare` the relative
    /// median tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    t_min: Option<f64>,
    #[arg(long, global = true)]
    t_max: Option<f64>,
    /// Internal ray angle (turns) for the puzzle graph.
    #[arg(long, global = true)]
    theta: Option<f64>,
    /// Equipotential level for the puzzle graph.
    #[arg(long, global = true)]
    level: Option<f64>,
    /// Half width M' of the puzzle band (ellipse foci ±v).
    #[arg(long, global = true)]
    m_prime: Option<f64>,
    /// Critical point index k of u + kπi for puzzles and tableaux.
    #[arg(long, global = true, allow_hyphen_values = true)]
    crit: Option<i64>,
    /// Tableau length (columns).
    #[arg(long, global = true)]
    time: Option<usize>,
    /// Half width M of R_M for renorm-escape.
    #[arg(long = "M", global = true)]
    half_width: Option<f64>,
    /// Strip index for renorm-escape (default: the strip containing v).
    #[arg(long, global = true, allow_hyphen_values = true)]
    k0: Option<i64>,
    /// Targets for the degree count.
    #[arg(long, global = true)]
    targets: Option<usize>,
    #[arg(long, global = true)]
    escape_re: Option<f64>,
    /// Also measure at twice the resolution and check stability.
    #[arg(long, global = true)]
    compare: bool,
    /// Scan: end of the segment in (u, v).
    #[arg(long, global = true, value_parser = complex, allow_hyphen_values = true)]
    u_end: Option<Complex64>,
    #[arg(long, global = true, value_parser = complex, allow_hyphen_values = true)]
    v_end: Option<Complex64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Scan target: `escaping` or `period:N`.
    #[arg(long, global = true, value_parser = target_arg)]
    target: Option<ScanTarget>,
}

macro_rules! fill {
    ($o:ident, $cfg:ident, $($field:ident : $key:literal => $parse:expr),* $(,)?) => {
        $(
            if $o.$field.is_none() {
                if let Some(s) = $cfg.get($key) {
                    $o.$field = Some($parse(s).map_err(|e| Error::Parse(format!("config {}: {e}", $key)))?);
                }
            }
        )*
    };
}

impl Opts {
    fn merge_config(&mut self) -> Result<()> {
        let Some(path) = &self.config else { return Ok(()) };
        let cfg = config::read(path)?;
        let o = self;
        fill!(o, cfg,
            a: "a" => complex, b: "b" => complex, u: "u" => complex, v: "v" => complex,
            address: "address" => parse_as::<String>,
            depth: "depth" => parse_as::<usize>,
            viewport: "viewport" => viewport_arg,
            px: "px" => px_arg,
            out: "out" => parse_as::<PathBuf>,
            json: "json" => parse_as::<PathBuf>,
            max_iter: "max-iter" => parse_as::<usize>,
            tol: "tol" => parse_as::<f64>,
            t_min: "t-min" => parse_as::<f64>,
            t_max: "t-max" => parse_as::<f64>,
            theta: "theta" => parse_as::<f64>,
            level: "level" => parse_as::<f64>,
            m_prime: "m-prime" => parse_as::<f64>,
            crit: "crit" => parse_as::<i64>,
            time: "time" => parse_as::<usize>,
            half_width: "M" => parse_as::<f64>,
            k0: "k0" => parse_as::<i64>,
            targets: "targets" => parse_as::<usize>,
            escape_re: "escape-re" => parse_as::<f64>,
            u_end: "u-end" => complex,
            v_end: "v-end" => complex,
            samples: "samples" => parse_as::<usize>,
            target: "target" => target_arg,
        );
        if !o.compare {
            o.compare = cfg.get("compare").is_some_and(|s| s == "true" || s == "1");
        }
        Ok(())
    }

    fn map(&self) -> Result<CosineMap> {
        match (self.u, self.v, self.a, self.b) {
            (Some(u), Some(v), None, None) => CosineMap::from_normal_form(u, v),
            (None, None, Some(a), Some(b)) => CosineMap::from_coefficients(a, b),
            (None, None, None, None) => Err(Error::Precondition("give --a and --b, or --u and --v".into())),
            _ => Err(Error::InvalidParameter("use either --a/--b or --u/--v, both of each pair".into())),
        }
    }

    fn address(&self) -> Result<Address> {
        self.address
            .as_deref()
            .ok_or_else(|| Error::Precondition("--address is required".into()))?
            .parse()
    }

    fn viewport(&self, m: &CosineMap, default_px: (usize, usize)) -> Result<Viewport> {
        let (cx, cy, w) = self.viewport.unwrap_or((m.u.re, m.u.im, 8.0));
        Viewport::new(Complex64::new(cx, cy), w, self.px.unwrap_or(default_px))
    }

    fn emit<T: Serialize + ?Sized>(&self, value: &T) -> Result<()> {
        match &self.json {
            Some(p) => export::write_json(p, value),
            None => {
                let mut out = std::io::stdout().lock();
                match writeln!(out, "{}", export::to_json(value)?) {
                    Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                    _ => Ok(()),
                }
            }
        }
    }
}

fn write_image(path: &Path, img: &cosine_puzzle::render::Image) -> Result<()> {
    img.write_ppm(path)?;
    eprintln!("wrote {} ({}x{})", path.display(), img.width, img.height);
    Ok(())
}

/// Classifies the viewport and draws `objects` over it into `--out`.
fn picture(o: &Opts, m: &CosineMap, objects: &[OverlayObject]) -> Result<()> {
    let Some(out) = &o.out else { return Ok(()) };
    let vp = o.viewport(m, (800, 600))?;
    let r = classify_viewport(m, &vp, o.max_iter.unwrap_or(300), o.escape_re.unwrap_or(60.0))?;
    write_image(out, &overlay(&r.image(), &vp, objects))
}

fn curve_objects(curves: &[Curve]) -> Vec<OverlayObject> {
    curves
        .iter()
        .map(|c| {
            let tag = match c.tag {
                CurveTag::DynamicRay => Tag::Ray,
                CurveTag::Equipotential => Tag::Equipotential,
                CurveTag::EllipseArc => Tag::Ellipse,
                _ => Tag::Graph,
            };
            OverlayObject {
                tag,
                points: c.points.clone(),
                closed: c.closed,
            }
        })
        .collect()
}

fn piece_objects(pieces: &[&PuzzlePiece]) -> Vec<OverlayObject> {
    pieces
        .iter()
        .map(|p| OverlayObject::polygon(Tag::Piece, p.polygon.clone()))
        .collect()
}

#[derive(Serialize)]
struct RenderSummary {
    palette_version: u32,
    viewport: Viewport,
    attractors: Vec<cosine_puzzle::render::Attractor>,
    escaping: usize,
    attracted: usize,
    unresolved: usize,
}

fn cmd_render(o: &Opts) -> Result<()> {
    let m = o.map()?;
    let vp = o.viewport(&m, (800, 600))?;
    let r = classify_viewport(&m, &vp, o.max_iter.unwrap_or(300), o.escape_re.unwrap_or(60.0))?;
    let mut objects = Vec::new();
    if o.address.is_some() {
        let ray = land_ray(&m, &o.address()?)?;
        let mut pts = ray.points();
        if let Some(l) = ray.landing {
            pts.push(l.point);
        }
        objects.push(OverlayObject::curve(Tag::Ray, pts));
    }
    let out = o.out.clone().unwrap_or_else(|| PathBuf::from("julia.ppm"));
    write_image(&out, &overlay(&r.image(), &vp, &objects))?;
    if o.json.is_some() {
        let count = |f: fn(&PixelClass) -> bool| r.classes.iter().filter(|c| f(c)).count();
        o.emit(&RenderSummary {
            palette_version: PALETTE_VERSION,
            viewport: vp,
            attractors: r.attractors.clone(),
            escaping: count(|c| matches!(c, PixelClass::Escaping { .. })),
            attracted: count(|c| matches!(c, PixelClass::Attracted { .. })),
            unresolved: count(|c| matches!(c, PixelClass::Unresolved)),
        })?;
    }
    Ok(())
}

fn cmd_trace_ray(o: &Opts) -> Result<()> {
    let m = o.map()?;
    let s = o.address()?;
    let ray = trace_ray(&m, &s, o.t_min.unwrap_or(1.0), o.t_max.unwrap_or(20.0), o.depth.unwrap_or(DEFAULT_DEPTH))?;
    picture(o, &m, &[OverlayObject::curve(Tag::Ray, ray.points())])?;
    o.emit(&RayRecord::from(&ray))
}

fn cmd_land(o: &Opts) -> Result<()> {
    let m = o.map()?;
    let s = o.address()?;
    let ray = land_ray(&m, &s)?;
    let Some(l) = ray.landing else {
        return Err(Error::Inconclusive(format!("ray {s} did not settle down to t = {}", ray.t_min)));
    };
    picture(
        o,
        &m,
        &[
            OverlayObject::curve(Tag::Ray, ray.points()),
            OverlayObject::curve(Tag::Point, vec![l.point]),
        ],
    )?;
    o.emit(&RayRecord::from(&ray))
}

fn superattracting_chart(m: &CosineMap) -> Result<BasinChart> {
    let class = classify_critical_orbit(m, CriticalValue::Plus, 4000);
    match (class.kind, class.cycle) {
        (OrbitKind::Attracted, Some(cycle)) => {
            let chart = BasinChart::new(m, cycle[0], cycle.len())?;
            if chart.mode != ChartMode::Boettcher {
                return Err(Error::Precondition(format!(
                    "the puzzle needs v in a superattracting basin (multiplier {:.3e})",
                    chart.multiplier.norm()
                )));
            }
            Ok(chart)
        }
        _ => Err(Error::Precondition("v is not attracted to a cycle; no basin to build a puzzle in".into())),
    }
}

fn graph(o: &Opts, m: &CosineMap) -> Result<PuzzleGraph> {
    let chart = superattracting_chart(m)?;
    let (a, _) = ellipse_semi_axes(m.v, o.m_prime.unwrap_or(3.0));
    let level = o.level.unwrap_or(0.5);
    if o.address.is_some() {
        build_graph(m, &chart, o.theta.unwrap_or(0.0), &o.address()?, level, a + 3.0)
    } else {
        find_graph(m, &chart, level, a + 3.0)
    }
}

#[derive(Serialize)]
struct GraphRecord<'a> {
    spec: &'a GraphSpec,
    landing: Complex64,
    landing_gap: f64,
    period: usize,
    invariance_defect: f64,
    curves: &'a [Curve],
}

fn cmd_graph(o: &Opts) -> Result<()> {
    let m = o.map()?;
    let g = graph(o, &m)?;
    picture(o, &m, &curve_objects(&g.curves))?;
    o.emit(&GraphRecord {
        spec: &g.spec,
        landing: g.landing,
        landing_gap: g.landing_gap,
        period: g.period,
        invariance_defect: g.invariance_defect(g.extent),
        curves: &g.curves,
    })
}

fn modified_puzzle(o: &Opts, m: &CosineMap) -> Result<(ModifiedPuzzle, Complex64)> {
    let g = graph(o, m)?;
    let c = m.critical_point(o.crit.unwrap_or(-1));
    let fc = m.eval(c).map_err(|_| Error::Inconsistent("critical value overflow".into()))?;
    let p = bounded_modification(&g, o.m_prime.unwrap_or(3.0), o.tol.unwrap_or(0.04), &[c, fc])?;
    Ok((p, c))
}

#[derive(Serialize)]
struct PuzzleRecord<'a> {
    m_prime: f64,
    containment_margin: f64,
    depth0: &'a [PuzzlePiece],
    nest: Vec<&'a PuzzlePiece>,
}

fn cmd_puzzle(o: &Opts) -> Result<()> {
    let m = o.map()?;
    let (mut p, c) = modified_puzzle(o, &m)?;
    let depth = o.depth.unwrap_or(3);
    let ids: Vec<usize> = (0..=depth).map(|n| p.piece_at(n, c)).collect::<Result<_>>()?;
    let nest: Vec<&PuzzlePiece> = ids.iter().enumerate().map(|(n, &id)| p.piece(n, id)).collect();
    let mut objects = curve_objects(&p.curves);
    objects.push(OverlayObject::polygon(Tag::Ellipse, ellipse_curve(&m, p.m_prime, 400)));
    objects.extend(piece_objects(&nest));
    picture(o, &m, &objects)?;
    o.emit(&PuzzleRecord {
        m_prime: p.m_prime,
        containment_margin: p.containment_margin,
        depth0: p.pieces(0),
        nest,
    })
}

fn cmd_tableau(o: &Opts, detect: bool) -> Result<()> {
    let m = o.map()?;
    let (mut p, c) = modified_puzzle(o, &m)?;
    let depth = o.depth.unwrap_or(if detect { 8 } else { 4 });
    let tab = tableau(&mut p, c, depth, o.time.unwrap_or(depth + 1))?;
    if !detect {
        let csv = tab.to_csv();
        match &o.out {
            Some(path) => export::write_text(path, &csv)?,
            None => {
                if let Err(e) = std::io::stdout().lock().write_all(csv.as_bytes()) {
                    if e.kind() != std::io::ErrorKind::BrokenPipe {
                        return Err(e.into());
                    }
                }
            }
        }
        return match &o.json {
            Some(path) => export::write_json(path, &tab),
            None => Ok(()),
        };
    }
    let cand = detect_renormalization(&p, &tab)?.ok_or_else(|| {
        Error::Inconclusive("the critical tableau is not periodic with a critical-free return; no renormalization".into())
    })?;
    if o.out.is_some() {
        let objects = vec![
            OverlayObject::polygon(Tag::Domain, cand.domain.clone()),
            OverlayObject::polygon(Tag::Codomain, cand.codomain.clone()),
        ];
        picture(o, &m, &objects)?;
    }
    o.emit(&cand)
}

fn cmd_renorm_escape(o: &Opts) -> Result<()> {
    let m = o.map()?;
    let cand = renorm_domain(&m, o.k0, o.half_width.unwrap_or(4.0), o.targets.unwrap_or(50))?;
    if o.out.is_some() {
        let mut objects = vec![
            OverlayObject::polygon(Tag::Domain, cand.domain.clone()),
            OverlayObject::polygon(Tag::Codomain, cand.codomain.clone()),
            OverlayObject::curve(Tag::Slit, cand.codomain_slit.clone()),
        ];
        objects.extend(cand.slits.iter().map(|s| OverlayObject::curve(Tag::Slit, s.clone())));
        picture(o, &m, &objects)?;
    }
    o.emit(&cand)
}

fn cmd_diameters(o: &Opts) -> Result<()> {
    let m = o.map()?;
    let vp = o.viewport(&m, (800, 800))?;
    let iters = o.max_iter.unwrap_or(500);
    let er = o.escape_re.unwrap_or(60.0);
    let r = classify_viewport(&m, &vp, iters, er)?;
    if r.attractors.is_empty() {
        return Err(Error::Precondition("no attracting cycle: nothing to measure".into()));
    }
    let coarse = component_report(&r, &DEFAULT_EPS);
    if let Some(out) = &o.out {
        write_image(out, &r.image())?;
    }
    if !o.compare {
        return o.emit(&coarse);
    }
    let fine = component_report(&classify_viewport(&m, &vp.scaled(2), iters, er)?, &DEFAULT_EPS);
    let check = compare_resolutions(&coarse, &fine, 0.05, o.tol.unwrap_or(0.1), 3);
    o.emit(&check)?;
    if check.count_change >= 0.1 || !check.medians_non_increasing {
        return Err(Error::Resolution(format!(
            "counts above 0.05 changed by {:.1}% under doubling, medians non-increasing: {}",
            100.0 * check.count_change,
            check.medians_non_increasing
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct ScanRecord<'a> {
    slice: Slice,
    target: ScanTarget,
    hits: &'a [cosine_puzzle::scan::ScanHit],
    best: &'a cosine_puzzle::scan::ScanHit,
}

fn cmd_scan(o: &Opts) -> Result<()> {
    let (Some(u0), Some(v0)) = (o.u, o.v) else {
        return Err(Error::Precondition("scan needs the segment start --u/--v".into()));
    };
    let slice = Slice {
        u0,
        v0,
        u1: o.u_end.unwrap_or(u0),
        v1: o.v_end.unwrap_or(v0),
        samples: o.samples.unwrap_or(41),
    };
    let target = o.target.unwrap_or(ScanTarget::EscapingValue);
    let hits = scan(&slice, target, o.max_iter.unwrap_or(2000));
    let best = best_hit(&hits)?;
    o.emit(&ScanRecord {
        slice,
        target,
        hits: &hits,
        best,
    })
}

fn run(cli: Cli) -> Result<()> {
    let mut o = cli.opts;
    o.merge_config()?;
    match cli.cmd {
        Cmd::Render => cmd_render(&o),
        Cmd::TraceRay => cmd_trace_ray(&o),
        Cmd::Land => cmd_land(&o),
        Cmd::Graph => cmd_graph(&o),
        Cmd::Puzzle => cmd_puzzle(&o),
        Cmd::Tableau => cmd_tableau(&o, false),
        Cmd::RenormTableau => cmd_tableau(&o, true),
        Cmd::RenormEscape => cmd_renorm_escape(&o),
        Cmd::Diameters => cmd_diameters(&o),
        Cmd::Scan => cmd_scan(&o),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
