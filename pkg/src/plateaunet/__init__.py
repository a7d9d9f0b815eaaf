"""Classical-network reparameterisation of variational circuits and barren-plateau diagnostics."""

from .ansatz import AnsatzSpec, apply_ansatz, apply_entangler, build_unitary, param_count
from .cost import dataset_cost, local_cost, observable_cost
from .encoding import qubit_encode, wavefunction_encode
from .errors import ConfigurationError, ShapeError, ValidationError
from .gradients import CircuitEvaluator, finite_diff_grad, hybrid_grad, param_shift_grad
from .mlp import backward, forward, init_model, make_architecture, sgd_step
from .statevector import StateVector, zero_state
from .trainer import RunResult, TrainConfig, run_sweep, train, train_baseline, train_hybrid

__version__ = "0.1.0"
