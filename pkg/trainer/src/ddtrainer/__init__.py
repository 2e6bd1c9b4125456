"""Training side of the DD-window denoiser (shares only file formats with the
inference library)."""

from .data import SnapshotRecords, Split, load_records, split_records
from .model import GatedDenoiser, expected_param_count, tensor_to_windows, windows_to_tensor
from .train import TrainConfig, TrainReport, emit_parity_vectors, evaluate_nmse, train
from .weights import export_weights, import_weights

__version__ = "0.1.0"
