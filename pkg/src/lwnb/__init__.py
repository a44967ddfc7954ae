"""Locally weighted naive Bayes, with naive Bayes and kNN baselines."""

__version__ = "0.1.0"

from .bayes import WeightedNBModel, fit_weighted_nb
from .classifiers import KNN, LWNB, ClassifierConfig, NaiveBayes
from .dataset import AttributeSpec, CsvConfig, Dataset, DatasetSchema, load_csv, stratified_folds
from .evaluation import corrected_resampled_ttest, cross_validate, evaluate

__all__ = [
    "AttributeSpec", "ClassifierConfig", "CsvConfig", "Dataset", "DatasetSchema", "KNN", "LWNB",
    "NaiveBayes", "WeightedNBModel", "corrected_resampled_ttest", "cross_validate", "evaluate",
    "fit_weighted_nb", "load_csv", "stratified_folds",
]
