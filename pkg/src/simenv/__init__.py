"""Gym-style environments generated from decision points in simulation models."""
from simenv.bridge import (
    ContractViolation,
    EmptyEpisodeError,
    EnvDefinition,
    EnvRegistry,
    InvalidActionError,
    LivenessError,
    RegistrationError,
    SimEnv,
    SimEnvError,
    SimulationFault,
    SimulationInterface,
    generate_env,
    make,
    make_step,
    register,
)
from simenv.plugins import (
    ChangedArgs,
    ChangedResult,
    HandlerPosition,
    HookRegistry,
    attach_handler,
    expose_to_plugins,
    remove_handler,
)
from simenv.spaces import Box, Discrete

__all__ = [
    "Box", "ChangedArgs", "ChangedResult", "ContractViolation", "Discrete",
    "EmptyEpisodeError", "EnvDefinition", "EnvRegistry", "HandlerPosition",
    "HookRegistry", "InvalidActionError", "LivenessError", "RegistrationError",
    "SimEnv", "SimEnvError", "SimulationFault", "SimulationInterface",
    "attach_handler", "expose_to_plugins", "generate_env", "make", "make_step",
    "register", "remove_handler",
]
