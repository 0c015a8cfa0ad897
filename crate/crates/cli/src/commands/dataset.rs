use std::collections::{HashMap, HashSet};
use std::path::Path;

use normprobe_core::datamodel::DatasetRows;
use normprobe_core::dataset_ops::{
    annotation_recall, apply_merge, assemble_norms, binarize_ratings, filter_rare_attributes,
    parse_annotations, plan_attribute_merge, restrict_concepts, AnnotationRecord, BinarizeRule,
    TruthMapping,
};
use normprobe_core::ConceptId;

use crate::cli::{
    AssembleArgs, BinarizeArgs, BinarizeRuleArg, DatasetCommand, FilterArgs, MergeArgs,
    ParseAnnotationsArgs, RecallArgs, RestrictArgs,
};
use crate::commands::run::scale;
use crate::datasets::{self, DatasetKind};
use crate::error::{CliError, Result};
use crate::nprb;
use crate::output::{sibling, sig6, write_atomic};

pub const RECORDS_HEADER: [&str; 4] = ["line", "concept", "attribute", "valid"];
pub const FAILURES_HEADER: [&str; 4] = ["line", "valid_offset", "reason", "raw"];

pub fn execute(cmd: DatasetCommand) -> Result<()> {
    match cmd {
        DatasetCommand::ParseAnnotations(a) => parse(&a),
        DatasetCommand::Assemble(a) => assemble(&a),
        DatasetCommand::Filter(a) => filter(&a),
        DatasetCommand::Merge(a) => merge(&a),
        DatasetCommand::Binarize(a) => binarize(&a),
        DatasetCommand::Restrict(a) => restrict(&a),
        DatasetCommand::Recall(a) => recall(&a),
    }
}

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn truth_mapping(args: &ParseAnnotationsArgs) -> Result<TruthMapping> {
    let mut mapping = if args.no_default_truth {
        TruthMapping::empty()
    } else {
        TruthMapping::default()
    };
    for spec in &args.truth {
        let (token, value) = spec
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--truth `{spec}` is not TOKEN=BOOL")))?;
        let value: bool = value.trim().parse().map_err(|_| {
            CliError::Usage(format!("--truth `{spec}`: value must be true or false"))
        })?;
        mapping.set(token, value)?;
    }
    Ok(mapping)
}

fn parse(args: &ParseAnnotationsArgs) -> Result<()> {
    let mapping = truth_mapping(args)?;
    let text = std::fs::read_to_string(&args.input).map_err(|e| CliError::io(&args.input, e))?;
    let parsed = parse_annotations(text.lines(), &mapping);
    let records: Vec<Vec<String>> = parsed
        .records
        .iter()
        .map(|r| {
            vec![
                r.source_line.to_string(),
                r.concept.as_str().to_owned(),
                r.attribute.clone(),
                r.valid.to_string(),
            ]
        })
        .collect();
    let failures: Vec<Vec<String>> = parsed
        .failures
        .iter()
        .map(|f| {
            vec![
                f.source_line.to_string(),
                f.valid_offset.map(|o| o.to_string()).unwrap_or_default(),
                f.reason.to_string(),
                f.raw.clone(),
            ]
        })
        .collect();
    let failures_path = args
        .failures
        .clone()
        .unwrap_or_else(|| sibling(&args.output, ".failures.csv"));
    write_atomic(&args.output, &csv_bytes(&RECORDS_HEADER, &records))?;
    write_atomic(&failures_path, &csv_bytes(&FAILURES_HEADER, &failures))?;
    eprintln!(
        "{} records, {} parse failures (listed in {})",
        records.len(),
        failures.len(),
        failures_path.display()
    );
    Ok(())
}

/// Reads records written by `parse-annotations`.
pub fn read_records(path: &Path) -> Result<Vec<AnnotationRecord>> {
    let mut reader =
        csv::Reader::from_path(path).map_err(|e| CliError::io(path, std::io::Error::other(e)))?;
    let header = reader
        .headers()
        .map_err(|e| CliError::format(path, Some(1), e.to_string()))?;
    if header.iter().ne(RECORDS_HEADER) {
        return Err(CliError::format(
            path,
            Some(1),
            format!("header must be `{}`", RECORDS_HEADER.join(",")),
        ));
    }
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            CliError::format(path, e.position().map(|p| p.line() as usize), e.to_string())
        })?;
        let line = row.position().map(|p| p.line() as usize);
        let bad = |m: String| CliError::format(path, line, m);
        out.push(AnnotationRecord {
            source_line: row[0]
                .parse()
                .map_err(|_| bad(format!("line `{}` is not a number", &row[0])))?,
            concept: ConceptId::new(&row[1]).map_err(|e| bad(e.to_string()))?,
            attribute: row[2].trim().to_owned(),
            valid: row[3]
                .parse()
                .map_err(|_| bad(format!("valid `{}` is not true or false", &row[3])))?,
        });
    }
    Ok(out)
}

fn assemble(args: &AssembleArgs) -> Result<()> {
    let records = read_records(&args.records)?;
    let concepts = datasets::read_concept_list(&args.concepts)?;
    let attributes = datasets::read_attribute_types(&args.attributes)?;
    let (norms, report) = assemble_norms(&records, &concepts, &attributes)?;
    if report.duplicates > 0 {
        log::warn!(
            "{} repeated records agreed with earlier ones and were dropped",
            report.duplicates
        );
    }
    datasets::write_norms(&args.output, &norms)?;
    Ok(())
}

fn load_norms(input: &Path, attributes: Option<&Path>) -> Result<normprobe_core::NormDataset> {
    let companion = datasets::companion_path(input, attributes)?;
    datasets::read_norms(input, &companion)
}

fn filter(args: &FilterArgs) -> Result<()> {
    let norms = load_norms(&args.input, args.attributes.as_deref())?;
    let kept = filter_rare_attributes(&norms, args.min_positive)?;
    eprintln!(
        "kept {} of {} attributes with at least {} positive concepts",
        kept.n_attributes(),
        norms.n_attributes(),
        args.min_positive
    );
    datasets::write_norms(&args.output, &kept)?;
    Ok(())
}

fn merge(args: &MergeArgs) -> Result<()> {
    let norms = load_norms(&args.input, args.attributes.as_deref())?;
    let embeddings = nprb::read(&args.attribute_embeddings)?;
    let counts: HashMap<String, usize> = norms
        .attributes()
        .iter()
        .zip(norms.positive_counts())
        .map(|(a, &c)| (a.name().to_owned(), c))
        .collect();
    let plan = plan_attribute_merge(&embeddings, args.threshold, &counts)?;
    let merged = apply_merge(&norms, &plan)?;
    let rows: Vec<Vec<String>> = plan
        .clusters
        .iter()
        .filter(|c| c.members.len() > 1)
        .flat_map(|c| {
            c.members
                .iter()
                .map(move |m| vec![c.representative.clone(), m.clone()])
        })
        .collect();
    let plan_path = args
        .plan
        .clone()
        .unwrap_or_else(|| sibling(&args.output, ".merge.csv"));
    write_atomic(&plan_path, &csv_bytes(&["representative", "member"], &rows))?;
    datasets::write_norms(&args.output, &merged)?;
    eprintln!(
        "{} clusters merged; {} of {} attributes remain",
        plan.n_merged(),
        merged.n_attributes(),
        norms.n_attributes()
    );
    Ok(())
}

fn binarize(args: &BinarizeArgs) -> Result<()> {
    let companion = datasets::companion_path(&args.input, args.attributes.as_deref())?;
    let ratings = datasets::read_ratings(&args.input, &companion, scale(&args.scale))?;
    let rule = match args.rule {
        BinarizeRuleArg::StrictlyAboveMedian => BinarizeRule::StrictlyAboveMedian,
        BinarizeRuleArg::AtOrAboveMedian => BinarizeRule::AtOrAboveMedian,
    };
    let norms = binarize_ratings(&ratings, rule)?;
    datasets::write_norms(&args.output, &norms)?;
    Ok(())
}

fn restrict(args: &RestrictArgs) -> Result<()> {
    let keep: HashSet<ConceptId> = match (&args.keep, &args.keep_embeddings) {
        (Some(p), _) => datasets::read_concept_list(p)?.into_iter().collect(),
        (None, Some(p)) => nprb::read(p)?.ids().iter().cloned().collect(),
        (None, None) => return Err(CliError::Usage("pass --keep or --keep-embeddings".into())),
    };
    let companion = datasets::companion_path(&args.input, args.attributes.as_deref())?;
    let (before, after) = match datasets::detect_kind(&args.input)? {
        DatasetKind::Norms => {
            let d = datasets::read_norms(&args.input, &companion)?;
            let r = restrict_concepts(&d, &keep)?;
            datasets::write_norms(&args.output, &r)?;
            (d.concepts().len(), r.concepts().len())
        }
        DatasetKind::Ratings => {
            let d = datasets::read_ratings(&args.input, &companion, scale(&args.scale))?;
            let r = restrict_concepts(&d, &keep)?;
            datasets::write_ratings(&args.output, &r)?;
            (d.concepts().len(), r.concepts().len())
        }
    };
    eprintln!("kept {after} of {before} concepts");
    Ok(())
}

fn recall(args: &RecallArgs) -> Result<()> {
    let reference = load_norms(&args.reference, args.reference_attributes.as_deref())?;
    let assembled = load_norms(&args.assembled, args.assembled_attributes.as_deref())?;
    let rows: Vec<Vec<String>> = annotation_recall(&reference, &assembled)
        .into_iter()
        .map(|r| {
            vec![
                r.attribute,
                r.reference_positives.to_string(),
                r.assembled_positives.to_string(),
                r.recovered.to_string(),
                sig6(r.recall),
            ]
        })
        .collect();
    let bytes = csv_bytes(
        &[
            "attribute",
            "reference_positives",
            "assembled_positives",
            "recovered",
            "recall",
        ],
        &rows,
    );
    match &args.output {
        Some(p) => write_atomic(p, &bytes),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}
