"""Turn a decision point inside a running simulation into a Gym-style env.

The simulation keeps its own main loop. When it calls a decision function
wrapped by :func:`make_step` while an environment is bound, the call hands
an observation to the environment user and blocks until ``step`` supplies
the next action. ``reset``/``step`` block in turn until the simulation
reaches the next decision or finishes. Exactly one of the two sides runs at
any time; the hand-off is a pair of one-slot queues used as a baton.

The simulation side runs in a dedicated daemon thread per episode.
"""
from __future__ import annotations

import contextlib
import enum
import logging
import queue
import re
import threading
from abc import ABC, abstractmethod
from collections.abc import Mapping
from dataclasses import dataclass, field

from simenv.plugins import qualified_name
from simenv.spaces import Discrete, contains

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 5.0


class SimEnvError(Exception):
    pass


class RegistrationError(SimEnvError, LookupError):
    pass


class ContractViolation(SimEnvError):
    """An environment method was called in a state that does not allow it."""


class InvalidActionError(ContractViolation, ValueError):
    pass


class ObservationError(SimEnvError, ValueError):
    pass


class EmptyEpisodeError(SimEnvError):
    pass


class SimulationFault(SimEnvError):
    """The simulation raised; the original exception is ``__cause__``."""


class LivenessError(SimEnvError, TimeoutError):
    pass


class EpisodeCancelled(BaseException):
    """Raised inside the simulation to unwind a suspended decision call.

    Derives from BaseException so that ``except Exception`` blocks in model
    code do not swallow it.
    """


class SimulationInterface(ABC):
    """What a simulation runner must provide to back an environment."""

    @abstractmethod
    def reset(self):
        """Return simulation to initial state."""

    @abstractmethod
    def run(self):
        """Run the simulation loop. Terminate at end of an episode."""

    @abstractmethod
    def stop(self):
        """Tell the simulation to stop/abort the episode."""

    def set_seed(self, seed):
        self.seed = seed

    def info(self):
        return {}


# ---------------------------------------------------------------------------
# Environment definitions and the decision-point registry


@dataclass(frozen=True)
class EnvDefinition:
    """Everything needed to present one decision point as an environment.

    ``observation_map`` and the functions made by ``reward_map_factory``
    receive the subject of the decision call: its first positional argument
    (``self`` for methods), or the simulation if the call had none.
    ``action_map`` is a callable or, for Discrete action spaces, a table
    from action index to domain value.
    """

    decision_point: str
    observation_space: object
    observation_map: object
    action_space: object
    action_map: object
    reward_map_factory: object

    def __post_init__(self):
        if isinstance(self.action_map, Mapping):
            if not isinstance(self.action_space, Discrete):
                raise ValueError("a lookup-table action map needs a Discrete action space")
            if set(self.action_map) != set(range(self.action_space.n)):
                raise ValueError(
                    f"action table keys {sorted(self.action_map)} do not cover "
                    f"0..{self.action_space.n - 1}"
                )
        elif not callable(self.action_map):
            raise TypeError("action_map must be callable or a mapping")

    def map_action(self, action):
        if isinstance(self.action_map, Mapping):
            return self.action_map[int(action)]
        return self.action_map(action)

    def observe(self, subject):
        obs = self.observation_map(subject)
        if not contains(self.observation_space, obs):
            raise ObservationError(f"observation {obs!r} outside {self.observation_space!r}")
        return obs


@dataclass
class _DecisionPoint:
    definition: EnvDefinition
    fallback: object
    binding: object = None
    override: object = None


class DecisionPointRegistry:
    def __init__(self):
        self._points = {}

    def __contains__(self, name):
        return name in self._points

    def names(self):
        return list(self._points)

    def add(self, definition, fallback):
        name = definition.decision_point
        if name in self._points:
            raise RegistrationError(f"decision point {name!r} is already registered")
        self._points[name] = _DecisionPoint(definition, fallback)
        return self._points[name]

    def get(self, name):
        try:
            return self._points[name]
        except KeyError:
            raise RegistrationError(f"unknown decision point {name!r}") from None

    def definition(self, name):
        return self.get(name).definition

    def fallback(self, name):
        return self.get(name).fallback

    def bind(self, name, env):
        point = self.get(name)
        if point.binding is not None and point.binding is not env:
            raise ContractViolation(
                f"decision point {name!r} already has an active environment"
            )
        point.binding = env

    def unbind(self, name, env):
        point = self.get(name)
        if point.binding is env:
            point.binding = None

    def bound(self, name):
        return self.get(name).binding

    @contextlib.contextmanager
    def override(self, name, fn):
        """Temporarily replace the fallback body (used for standalone runs)."""
        point = self.get(name)
        previous, point.override = point.override, fn
        try:
            yield
        finally:
            point.override = previous


default_decision_points = DecisionPointRegistry()

_thread_state = threading.local()


def register_decision_point(definition, decision_fn, registry=None):
    """Register ``decision_fn`` under ``definition.decision_point`` and wrap it.

    Called from inside a bound environment's simulation context the wrapper
    hands control to the environment user; everywhere else it runs the
    original body.
    """
    registry = registry or default_decision_points
    point = registry.add(definition, decision_fn)
    name = definition.decision_point

    def decision(*args, **kwargs):
        episode = getattr(_thread_state, "episode", None)
        if episode is not None and episode.definition.decision_point == name:
            return episode.decide(args)
        return (point.override or decision_fn)(*args, **kwargs)

    decision.__name__ = getattr(decision_fn, "__name__", "decision")
    decision.__qualname__ = getattr(decision_fn, "__qualname__", decision.__name__)
    decision.__doc__ = getattr(decision_fn, "__doc__", None)
    decision.__wrapped__ = decision_fn
    decision.__decision_point__ = name
    return decision


def make_step(
    observation_space,
    observation_space_mapping,
    action_space,
    action_space_mapping,
    reward_mapping=None,
    *,
    reward_mapping_factory=None,
    name=None,
    registry=None,
):
    """Decorator marking a function as a decision point.

    Pass either ``reward_mapping`` (stateless) or ``reward_mapping_factory``,
    a zero-argument callable invoked at every reset to build a fresh reward
    function for that episode. ``name`` defaults to ``module.qualname`` of
    the decorated function.
    """
    if (reward_mapping is None) == (reward_mapping_factory is None):
        raise TypeError("give exactly one of reward_mapping or reward_mapping_factory")
    if reward_mapping_factory is None:
        reward_mapping_factory = lambda: reward_mapping  # noqa: E731

    def decorator(fn):
        definition = EnvDefinition(
            decision_point=name or qualified_name(fn),
            observation_space=observation_space,
            observation_map=observation_space_mapping,
            action_space=action_space,
            action_map=action_space_mapping,
            reward_map_factory=reward_mapping_factory,
        )
        return register_decision_point(definition, fn, registry)

    return decorator


def policy_decision(decision_point, policy, simulation=None, registry=None):
    """Build a plain decision body that applies ``policy`` directly.

    The returned function computes ``action_map(policy(observation))`` in the
    caller's own thread, with no environment involved. Install it with
    ``DecisionPointRegistry.override`` to run a policy embedded in the model.
    """
    definition = (registry or default_decision_points).definition(decision_point)

    def decide(*args, **kwargs):
        subject = args[0] if args else simulation
        return definition.map_action(policy(definition.observe(subject)))

    return decide


# ---------------------------------------------------------------------------
# Control transfer


class _LiveContexts:
    def __init__(self):
        self._lock = threading.Lock()
        self.count = 0

    def enter(self):
        with self._lock:
            self.count += 1

    def leave(self):
        with self._lock:
            self.count -= 1


_live_contexts = _LiveContexts()


def live_simulation_contexts():
    """Number of simulation threads currently alive across all environments."""
    return _live_contexts.count


@dataclass
class DecisionReached:
    observation: object
    reward: float
    info: dict = field(default_factory=dict)


@dataclass
class EpisodeEnded:
    observation: object
    reward: float
    info: dict = field(default_factory=dict)


@dataclass
class SimulationFaulted:
    error: BaseException


_CANCEL = object()


class Baton:
    """Synchronous two-way hand-off between the caller and the simulation.

    ``running`` names the side that currently holds control; ``transfers``
    counts hand-offs. Both exist so tests can check strict alternation.
    """

    def __init__(self):
        self._to_caller = queue.Queue(maxsize=1)
        self._to_simulation = queue.Queue(maxsize=1)
        self.running = "caller"
        self.transfers = 0

    def pass_to_simulation(self, message):
        self.running = "simulation"
        self.transfers += 1
        self._to_simulation.put(message)

    def pass_to_caller(self, event):
        self.running = "caller"
        self.transfers += 1
        self._to_caller.put(event)

    def wait_for_simulation(self, timeout):
        try:
            return self._to_caller.get(timeout=timeout)
        except queue.Empty:
            raise LivenessError(f"simulation did not yield control within {timeout} s") from None

    def wait_for_caller(self):
        return self._to_simulation.get()


class Lifecycle(enum.Enum):
    IDLE = "idle"
    AWAITING_ACTION = "awaiting_action"
    DONE = "done"
    CLOSED = "closed"


class _Episode:
    def __init__(self, env, reward_fn):
        self.env = env
        self.definition = env.definition
        self.reward_fn = reward_fn
        self.baton = Baton()
        self.thread = None
        self.subject = env.simulation
        self.steps = 0
        self.decisions = 0
        self.cancelled = False

    def evaluate(self):
        obs = self.definition.observe(self.subject)
        reward = self.reward_fn(self.subject)
        return obs, reward, dict(self.env.simulation.info())

    def decide(self, args):
        """Simulation side of a decision call."""
        if self.cancelled:
            raise EpisodeCancelled()
        assert self.baton.running == "simulation"
        if args:
            self.subject = args[0]
        self.decisions += 1
        self.baton.pass_to_caller(DecisionReached(*self.evaluate()))
        message = self.baton.wait_for_caller()
        if message is _CANCEL:
            raise EpisodeCancelled()
        return message

    def main(self):
        _thread_state.episode = self
        _live_contexts.enter()
        try:
            try:
                self.env.simulation.run()
                if self.decisions:
                    event = EpisodeEnded(*self.evaluate())
                else:
                    event = EpisodeEnded(None, 0.0)
            except EpisodeCancelled:
                return
            except BaseException as exc:  # noqa: BLE001 - forwarded to caller
                if self.cancelled:
                    log.warning("simulation raised while being cancelled: %r", exc)
                    return
                event = SimulationFaulted(exc)
            if not self.cancelled:
                self.baton.pass_to_caller(event)
        finally:
            _thread_state.episode = None
            _live_contexts.leave()


class SimEnv:
    """Gym-style environment driving one decision point of a simulation.

    ``reset()`` returns the first observation and ``step(action)`` returns
    ``(observation, reward, done, info)``. ``info`` always has ``"step"``.
    """

    def __init__(self, simulation, decision_point, env_id=None, timeout=DEFAULT_TIMEOUT, registry=None):
        self._registry = registry or default_decision_points
        self.definition = self._registry.definition(decision_point)
        self.simulation = simulation
        self.env_id = env_id
        self.timeout = timeout
        self.observation_space = self.definition.observation_space
        self.action_space = self.definition.action_space
        self.state = Lifecycle.IDLE
        self._seed = None
        self._episode = None

    def __repr__(self):
        return f"<SimEnv {self.env_id or self.definition.decision_point} {self.state.value}>"

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    @property
    def steps(self):
        return self._episode.steps if self._episode else 0

    def seed(self, seed):
        if self.state not in (Lifecycle.IDLE, Lifecycle.DONE):
            raise ContractViolation(f"seed() is not allowed while {self.state.value}")
        self._seed = seed

    def reset(self):
        if self.state is Lifecycle.CLOSED:
            raise ContractViolation("reset() on a closed environment")
        self._cancel_episode()
        name = self.definition.decision_point
        self._registry.bind(name, self)
        try:
            if self._seed is not None:
                self.simulation.set_seed(self._seed)
            self.simulation.reset()
            episode = _Episode(self, self.definition.reward_map_factory())
        except BaseException:
            self._registry.unbind(name, self)
            raise
        self._episode = episode
        episode.thread = threading.Thread(
            target=episode.main, name=f"simulation:{self.env_id or name}", daemon=True
        )
        episode.baton.running = "simulation"
        episode.thread.start()

        event = self._receive(episode)
        if isinstance(event, EpisodeEnded):
            self._finish_episode()
            raise EmptyEpisodeError("episode ended before first decision")
        self.state = Lifecycle.AWAITING_ACTION
        return event.observation

    def step(self, action):
        if self.state is not Lifecycle.AWAITING_ACTION:
            raise ContractViolation(f"step() is not allowed while {self.state.value}; call reset() first")
        if not contains(self.action_space, action):
            raise InvalidActionError(f"action {action!r} is not in {self.action_space!r}")
        episode = self._episode
        mapped = self.definition.map_action(action)
        episode.steps += 1
        episode.baton.pass_to_simulation(mapped)
        event = self._receive(episode)
        info = {**event.info, "step": episode.steps}
        if isinstance(event, EpisodeEnded):
            self._finish_episode()
            return event.observation, event.reward, True, info
        return event.observation, event.reward, False, info

    def close(self):
        if self.state is Lifecycle.CLOSED:
            return
        try:
            self._cancel_episode()
        except Exception:  # noqa: BLE001 - teardown is best effort
            log.exception("error while closing %r", self)
        self.state = Lifecycle.CLOSED

    def _receive(self, episode):
        try:
            event = episode.baton.wait_for_simulation(self.timeout)
        except LivenessError:
            # Leave the episode in place so close()/reset() can cancel it.
            self.state = Lifecycle.DONE
            raise
        assert episode.baton.running == "caller"
        if isinstance(event, SimulationFaulted):
            self._finish_episode()
            raise SimulationFault(f"simulation raised {event.error!r}") from event.error
        return event

    def _finish_episode(self):
        episode, self._episode = self._episode, None
        self.state = Lifecycle.DONE
        if episode is None:
            return
        episode.thread.join(self.timeout)
        self._registry.unbind(self.definition.decision_point, self)
        if episode.thread.is_alive():
            raise LivenessError("simulation thread did not exit after the episode ended")

    def _cancel_episode(self):
        episode, self._episode = self._episode, None
        if episode is None:
            return
        self.state = Lifecycle.DONE
        if episode.thread.is_alive():
            episode.cancelled = True
            self.simulation.stop()
            episode.baton.pass_to_simulation(_CANCEL)
            episode.thread.join(self.timeout)
        self._registry.unbind(self.definition.decision_point, self)
        if episode.thread.is_alive():
            raise LivenessError("simulation thread did not terminate after cancellation")


class EnvFactory:
    """Creates :class:`SimEnv` instances for one decision point.

    ``simulation`` is either a simulation instance, shared by every env the
    factory makes, or a zero-argument callable producing a fresh one per env.
    """

    def __init__(self, simulation, decision_point, registry=None):
        self._registry = registry or default_decision_points
        self.definition = self._registry.definition(decision_point)
        self.decision_point = decision_point
        self._simulation = simulation

    def new_simulation(self):
        if isinstance(self._simulation, SimulationInterface):
            return self._simulation
        return self._simulation()

    def __call__(self, env_id=None, timeout=DEFAULT_TIMEOUT):
        return SimEnv(
            self.new_simulation(), self.decision_point, env_id=env_id,
            timeout=timeout, registry=self._registry,
        )


def generate_env(simulation, decision_point, registry=None):
    return EnvFactory(simulation, decision_point, registry)


# ---------------------------------------------------------------------------
# Environment ids

_ENV_ID = re.compile(r"^[A-Za-z0-9_.-]+-v\d+$")


class EnvRegistry:
    """``"Name-vN"`` ids to environment factories."""

    def __init__(self):
        self._factories = {}

    def __contains__(self, env_id):
        return env_id in self._factories

    def ids(self):
        return sorted(self._factories)

    def register(self, env_id, factory, **kwargs):
        if not _ENV_ID.match(env_id):
            raise ValueError(f"environment id {env_id!r} does not look like 'Name-vN'")
        if env_id in self._factories:
            raise RegistrationError(f"environment {env_id!r} is already registered")
        self._factories[env_id] = (factory, kwargs)

    def factory(self, env_id):
        env_id = self._import_prefix(env_id)
        try:
            return self._factories[env_id][0]
        except KeyError:
            raise RegistrationError(f"unknown environment {env_id!r}") from None

    def make(self, env_id, **kwargs):
        env_id = self._import_prefix(env_id)
        try:
            factory, defaults = self._factories[env_id]
        except KeyError:
            raise RegistrationError(f"unknown environment {env_id!r}") from None
        return factory(env_id=env_id, **{**defaults, **kwargs})

    @staticmethod
    def _import_prefix(env_id):
        # "some.module:Name-v0" imports some.module first, like gym.make.
        if ":" in env_id:
            module, env_id = env_id.split(":", 1)
            import importlib

            importlib.import_module(module)
        return env_id


default_envs = EnvRegistry()


def register(env_id, factory, **kwargs):
    default_envs.register(env_id, factory, **kwargs)


def make(env_id, **kwargs):
    return default_envs.make(env_id, **kwargs)
