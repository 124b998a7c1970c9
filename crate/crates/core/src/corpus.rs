//! Benchmark programs shipped with the analyzer.

use crate::algebra::{parse_rational, Bindings, ParamSymbol};
use crate::frontend::{load, FrontendError, ValidatedProgram};

#[derive(Clone, Copy, Debug)]
pub struct CorpusProgram {
    pub name: &'static str,
    pub file: &'static str,
    pub source: &'static str,
    /// Parameter values used when validating numerically.
    pub bindings: &'static [(&'static str, &'static str)],
}

impl CorpusProgram {
    pub fn load(&self) -> Result<ValidatedProgram, FrontendError> {
        load(self.source)
    }

    pub fn default_bindings(&self) -> Bindings {
        parse_bindings(self.bindings.iter().copied()).expect("corpus bindings are valid")
    }
}

/// Builds bindings from `name = value` pairs with rational values.
pub fn parse_bindings<'a>(
    pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> Result<Bindings, String> {
    let mut out = Bindings::new();
    for (name, value) in pairs {
        let v = parse_rational(value)
            .ok_or_else(|| format!("`{value}` is not a rational number (for `{name}`)"))?;
        out.insert(ParamSymbol::new(name.trim()), v);
    }
    Ok(out)
}

const PROGRAMS: &[CorpusProgram] = &[
    CorpusProgram {
        name: "Coupon",
        file: "coupon.psl",
        source: include_str!("../corpus/coupon.psl"),
        bindings: &[],
    },
    CorpusProgram {
        name: "Coupon4",
        file: "coupon4.psl",
        source: include_str!("../corpus/coupon4.psl"),
        bindings: &[],
    },
    CorpusProgram {
        name: "Random_walk_1D_cts",
        file: "random_walk_1d_cts.psl",
        source: include_str!("../corpus/random_walk_1d_cts.psl"),
        bindings: &[],
    },
    CorpusProgram {
        name: "Sum_rnd_series",
        file: "sum_rnd_series.psl",
        source: include_str!("../corpus/sum_rnd_series.psl"),
        bindings: &[],
    },
    CorpusProgram {
        name: "Product_dep_var",
        file: "product_dep_var.psl",
        source: include_str!("../corpus/product_dep_var.psl"),
        bindings: &[],
    },
    CorpusProgram {
        name: "Random_walk_2D",
        file: "random_walk_2d.psl",
        source: include_str!("../corpus/random_walk_2d.psl"),
        bindings: &[],
    },
    CorpusProgram {
        name: "Binomial",
        file: "binomial.psl",
        source: include_str!("../corpus/binomial.psl"),
        bindings: &[("p", "1/2")],
    },
    CorpusProgram {
        name: "StutteringA",
        file: "stuttering_a.psl",
        source: include_str!("../corpus/stuttering_a.psl"),
        bindings: &[("d", "1")],
    },
    CorpusProgram {
        name: "StutteringP",
        file: "stuttering_p.psl",
        source: include_str!("../corpus/stuttering_p.psl"),
        bindings: &[("p", "1/2")],
    },
    CorpusProgram {
        name: "Square",
        file: "square.psl",
        source: include_str!("../corpus/square.psl"),
        bindings: &[],
    },
    CorpusProgram {
        name: "Multipath_walk",
        file: "multipath_walk.psl",
        source: include_str!("../corpus/multipath_walk.psl"),
        bindings: &[],
    },
];

pub fn corpus() -> &'static [CorpusProgram] {
    PROGRAMS
}

pub fn find(name: &str) -> Option<&'static CorpusProgram> {
    PROGRAMS.iter().find(|p| p.name.eq_ignore_ascii_case(name))
}
