use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{BoxedFunction, CommonArgs};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, GridSizes, Model, ModelParams, Point, QuadratureGrid, SphereSize};
use crate::testfns::{bump, suite, BumpSpec, TestFunction};
use crate::verify::{Check, VerifyConfig};

const TOLERANCE_KEYS: [&str; 7] = [
    "tol_lemma2",
    "tol_lemma1",
    "tol_kernel",
    "tol_convolution",
    "tol_plancherel",
    "tol_paley_wiener",
    "tol_eigen",
];

/// Raw settings before defaults are filled in.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    pub model: Option<Model>,
    pub nr: Option<usize>,
    pub nb: Option<SphereSize>,
    pub nlambda: Option<usize>,
    pub radius: Option<f64>,
    pub lambda_max: Option<f64>,
    pub lambda: Option<f64>,
    pub function: Option<String>,
    pub bump: Option<(f64, f64)>,
    pub method: Option<Method>,
    pub data: Option<String>,
    pub checks: Vec<Check>,
    pub profile: Option<String>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub tolerances: BTreeMap<String, f64>,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Config(format!("bad value '{value}' for {key}")))
}

fn parse_bump(s: &str) -> Result<(f64, f64)> {
    let (c, r) = s
        .split_once(',')
        .ok_or_else(|| Error::Config(format!("bump must be 'center_r,support', got '{s}'")))?;
    Ok((parse("bump center", c)?, parse("bump support", r)?))
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    /// `key = value` lines; `#` starts a comment; unknown keys are errors.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut s = Settings::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", n + 1)))?;
            s.set(&key.trim().replace('-', "_"), value.trim()).map_err(|e| {
                let msg = match e {
                    Error::Config(m) => m,
                    other => other.to_string(),
                };
                Error::Config(format!("line {}: {msg}", n + 1))
            })?;
        }
        Ok(s)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "model" => self.model = Some(Model::parse(value)?),
            "nr" => self.nr = Some(parse(key, value)?),
            "nb" => self.nb = Some(value.parse()?),
            "nlambda" => self.nlambda = Some(parse(key, value)?),
            "radius" => self.radius = Some(parse(key, value)?),
            "lambda_max" => self.lambda_max = Some(parse(key, value)?),
            "lambda" => self.lambda = Some(parse(key, value)?),
            "function" => self.function = Some(value.to_string()),
            "bump" => self.bump = Some(parse_bump(value)?),
            "method" => self.method = Some(Method::parse(value)?),
            "data" => self.data = Some(value.to_string()),
            "check" => {
                self.checks = value.split(',').map(|c| c.parse()).collect::<Result<_>>()?;
            }
            "profile" => self.profile = Some(value.to_string()),
            "seed" => self.seed = Some(parse(key, value)?),
            "threads" => self.threads = Some(parse(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            k if TOLERANCE_KEYS.contains(&k) => {
                self.tolerances.insert(k.to_string(), parse(key, value)?);
            }
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn apply_flags(&mut self, a: &CommonArgs) -> Result<()> {
        if let Some(m) = &a.model {
            self.model = Some(Model::parse(m)?);
        }
        if let Some(nb) = &a.nb {
            self.nb = Some(nb.parse()?);
        }
        if let Some(b) = &a.bump {
            self.bump = Some(parse_bump(b)?);
        }
        if let Some(m) = &a.method {
            self.method = Some(Method::parse(m)?);
        }
        if !a.check.is_empty() {
            self.checks = a.check.iter().map(|c| c.parse()).collect::<Result<_>>()?;
        }
        macro_rules! copy {
            ($($f:ident),*) => {$(
                if a.$f.is_some() {
                    self.$f = a.$f.clone();
                }
            )*};
        }
        copy!(nr, nlambda, radius, lambda_max, lambda, function, data, profile, seed, threads, out);
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Composed,
}

impl Method {
    fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "direct" => Ok(Method::Direct),
            "composed" => Ok(Method::Composed),
            other => Err(Error::Config(format!("unknown method '{other}' (expected direct or composed)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionSelector {
    Suite(String),
    Bump { center_r: f64, support: f64 },
}

/// Effective configuration of one run.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub model: Model,
    pub radius: f64,
    pub lambda_max: f64,
    pub sizes: GridSizes,
    pub lambda: Option<f64>,
    pub function: FunctionSelector,
    pub method: Method,
    pub data: String,
    pub checks: Vec<Check>,
    pub profile: String,
    pub seed: Option<u64>,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(skip)]
    settings: Settings,
}

impl RunConfig {
    pub fn resolve(command: &str, s: &Settings) -> Result<Self> {
        let model = s.model.ok_or_else(|| Error::Config("missing required --model (h2 or h3)".into()))?;
        let mut sizes = GridSizes::defaults(model);
        if let Some(n) = s.nr {
            sizes.radial = n;
        }
        if let Some(nb) = s.nb {
            sizes.boundary = nb;
        }
        if let Some(n) = s.nlambda {
            sizes.spectral = n;
        }
        sizes.validate(model)?;
        let radius = s.radius.unwrap_or(ModelParams::DEFAULT_SUPPORT_RADIUS);
        let lambda_max = s.lambda_max.unwrap_or(ModelParams::DEFAULT_SPECTRAL_CUTOFF);
        ModelParams::new(model, radius, lambda_max).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(l) = s.lambda {
            if !l.is_finite() {
                return Err(Error::Config("--lambda must be finite".into()));
            }
        }
        let function = match (s.bump, &s.function) {
            (Some(_), Some(_)) => return Err(Error::Config("--bump and --function are exclusive".into())),
            (Some((center_r, support)), None) => FunctionSelector::Bump { center_r, support },
            (None, Some(name)) => FunctionSelector::Suite(name.clone()),
            (None, None) => FunctionSelector::Suite("radial-half".into()),
        };
        let data = s.data.clone().unwrap_or_else(|| "helgason".into());
        if !["one", "exp", "helgason"].contains(&data.as_str()) {
            return Err(Error::Config(format!("unknown poisson data '{data}' (expected one, exp or helgason)")));
        }
        let profile = s.profile.clone().unwrap_or_else(|| "default".into());
        if !["default", "reduced"].contains(&profile.as_str()) {
            return Err(Error::Config(format!("unknown profile '{profile}' (expected default or reduced)")));
        }
        let config = Self {
            command: command.to_string(),
            model,
            radius,
            lambda_max,
            sizes,
            lambda: s.lambda,
            function,
            method: s.method.unwrap_or(Method::Composed),
            data,
            checks: s.checks.clone(),
            profile,
            seed: s.seed,
            tolerances: s.tolerances.clone(),
            settings: s.clone(),
        };
        if command != "verify" {
            config.function()?;
        } else {
            config.verify_config()?.validate()?;
        }
        Ok(config)
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.model, self.radius, self.lambda_max)
    }

    pub fn grid(&self) -> Result<QuadratureGrid> {
        QuadratureGrid::build(self.params()?, self.sizes)
    }

    pub(crate) fn function(&self) -> Result<BoxedFunction> {
        let params = self.params()?;
        let f: TestFunction = match &self.function {
            FunctionSelector::Suite(name) => {
                let members = suite(&params)?;
                let by_index = name.parse::<usize>().ok().and_then(|i| members.get(i).cloned());
                by_index
                    .or_else(|| members.into_iter().find(|f| f.name() == name))
                    .ok_or_else(|| Error::Config(format!("unknown suite function '{name}'")))?
            }
            FunctionSelector::Bump { center_r, support } => {
                let dim = self.model.dim();
                let center = Point::at_distance(&BoundaryPoint::axis(dim), *center_r)
                    .map_err(|e| Error::Config(e.to_string()))?;
                let b = bump(BumpSpec { support: *support, center, amplitude: 1.0 }, &params)
                    .map_err(|e| Error::Config(e.to_string()))?;
                TestFunction::single("bump", b)
            }
        };
        Ok(Box::new(f))
    }

    /// Harness settings: the chosen profile, then every explicit setting.
    pub fn verify_config(&self) -> Result<VerifyConfig> {
        let s = &self.settings;
        let mut c = match self.profile.as_str() {
            "reduced" => VerifyConfig::reduced(self.model),
            _ => VerifyConfig::defaults(self.model),
        };
        if let Some(n) = s.nr {
            c.sizes.radial = n;
        }
        if let Some(nb) = s.nb {
            c.sizes.boundary = nb;
        }
        if let Some(n) = s.nlambda {
            c.sizes.spectral = n;
        }
        if let Some(r) = s.radius {
            c.radius = r;
        }
        if let Some(l) = s.lambda_max {
            c.lambda_max = l;
        }
        if let Some(seed) = s.seed {
            c.seed = seed;
        }
        for (k, v) in &s.tolerances {
            match k.as_str() {
                "tol_lemma2" => c.tol_lemma2 = *v,
                "tol_lemma1" => c.tol_lemma1 = *v,
                "tol_kernel" => c.tol_kernel = *v,
                "tol_convolution" => c.tol_convolution = *v,
                "tol_plancherel" => c.tol_plancherel = *v,
                "tol_paley_wiener" => c.tol_paley_wiener = *v,
                "tol_eigen" => c.tol_eigen = *v,
                _ => unreachable!("tolerance keys are checked on input"),
            }
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_value_files() {
        let s = Settings::from_text("# comment\nmodel = h3\nnb = 8x16  # trailing\nlambda-max = 10\ntol_eigen = 1e-3\n")
            .unwrap();
        assert_eq!(s.model, Some(Model::H3));
        assert_eq!(s.nb, Some(SphereSize::Sphere { polar: 8, azimuth: 16 }));
        assert_eq!(s.lambda_max, Some(10.0));
        assert_eq!(s.tolerances["tol_eigen"], 1e-3);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(Settings::from_text("colour = blue").is_err());
        assert!(Settings::from_text("nr = many").is_err());
        assert!(Settings::from_text("model").is_err());
    }

    #[test]
    fn flags_override_file() {
        let mut s = Settings::from_text("model = h2\nnr = 10").unwrap();
        let args = CommonArgs { nr: Some(20), ..Default::default() };
        s.apply_flags(&args).unwrap();
        assert_eq!(s.nr, Some(20));
        let c = RunConfig::resolve("jeft", &s).unwrap();
        assert_eq!(c.sizes.radial, 20);
        assert_eq!(c.verify_config().unwrap().sizes.radial, 20);
    }

    #[test]
    fn missing_model_is_a_config_error() {
        assert!(matches!(RunConfig::resolve("jeft", &Settings::default()), Err(Error::Config(_))));
    }

    #[test]
    fn selects_functions() {
        let mut s = Settings { model: Some(Model::H2), ..Default::default() };
        s.function = Some("2".into());
        assert!(!RunConfig::resolve("helgason", &s).unwrap().function().unwrap().is_radial());
        s.function = Some("nope".into());
        assert!(RunConfig::resolve("helgason", &s).is_err());
        s.function = None;
        s.bump = Some((3.5, 1.0));
        assert!(RunConfig::resolve("helgason", &s).is_err());
        s.bump = Some((0.0, 1.0));
        assert!(RunConfig::resolve("spherical", &s).unwrap().function().unwrap().is_radial());
    }
}
