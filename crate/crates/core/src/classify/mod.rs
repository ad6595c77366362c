//! Kernel SVM classification of temporal graphs generated from null models.

mod experiment;
mod specfile;
mod svm;

pub use experiment::{
    dataset_gram, holdout_accuracy, populate_classes, populate_from_root, run_experiment, stratified_split,
    ArtifactCache, ClassPlan, ExperimentSpec, LabeledDataset, ModelPlan, Pipeline, Provenance, Report, RootSource,
    RunResult, GRID_BANDWIDTH, GRID_C,
};
pub use specfile::EXAMPLE_SPEC;
pub use svm::{smo_solve, svm_predict, svm_train, BinaryModel, DualSolution, SvmModel, SMO_TOLERANCE};
