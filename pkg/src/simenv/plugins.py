"""Before/after/instead extension hooks for exposed functions.

A function made extendable with :func:`expose_to_plugins` is registered under
a dotted name (``module.Class.method`` by default). Handlers attached to that
name run around, or in place of, the original body::

    f = expose_to_plugins(f)
    attach_handler(lambda x: ChangedArgs(x * 2), f, "before")

Handler call conventions:

* ``before(*args, **kwargs)``; may return :class:`ChangedArgs` to replace the
  arguments for everything downstream, or :class:`ChangedResult` to skip the
  original (and any instead handler) and go straight to the after handlers.
* ``instead(*args, **kwargs)``; its return value is the result. Only the most
  recently attached instead handler runs.
* ``after(*args, result, **kwargs)``; may return :class:`ChangedResult`.

Any other return value counts as "unchanged". Handler exceptions propagate.

The registry is meant to be set up before simulations run; mutating it while
an exposed function is executing in another thread is not supported.
"""
from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field


class HandlerPosition(str, enum.Enum):
    BEFORE = "before"
    AFTER = "after"
    INSTEAD = "instead"


class ChangedArgs:
    """Returned from a before handler to replace the call arguments."""

    def __init__(self, *args, **kwargs):
        self.args = args
        self.kwargs = kwargs

    def __repr__(self):
        return f"ChangedArgs(args={self.args!r}, kwargs={self.kwargs!r})"


class ChangedResult:
    """Returned from a handler to replace the call result."""

    def __init__(self, value):
        self.value = value

    def __repr__(self):
        return f"ChangedResult({self.value!r})"


class PluginError(LookupError):
    pass


@dataclass
class _Entry:
    original: object
    before: list = field(default_factory=list)
    after: list = field(default_factory=list)
    instead: list = field(default_factory=list)

    def handlers(self, position):
        return getattr(self, HandlerPosition(position).value)

    def idle(self):
        return not (self.before or self.after or self.instead)


def _check_name(name):
    if not isinstance(name, str) or not name or not all(name.split(".")):
        raise ValueError(f"invalid qualified name: {name!r}")


def qualified_name(fn):
    return f"{fn.__module__}.{fn.__qualname__}"


class HookRegistry:
    """Maps qualified names to their original callable and handler chains."""

    def __init__(self):
        self._entries = {}

    def __contains__(self, name):
        return name in self._entries

    def names(self):
        return list(self._entries)

    def resolve(self, target):
        """Accept either a registered name or the hooked callable itself."""
        name = getattr(target, "__plugin_name__", target)
        if not isinstance(name, str) or name not in self._entries:
            raise PluginError(f"no function exposed to plugins as {name!r}")
        return name

    def original(self, target):
        return self._entries[self.resolve(target)].original

    def expose(self, fn, name=None):
        if name is None:
            name = qualified_name(fn)
        _check_name(name)
        if name in self._entries:
            raise PluginError(f"{name!r} is already exposed to plugins")
        self._entries[name] = _Entry(original=fn)

        @functools.wraps(fn)
        def hooked(*args, **kwargs):
            return self.invoke(name, *args, **kwargs)

        hooked.__plugin_name__ = name
        hooked.__plugin_registry__ = self
        return hooked

    def attach(self, handler, target, position):
        name = self.resolve(target)
        self._entries[name].handlers(position).append(handler)

    def remove(self, target, position):
        name = self.resolve(target)
        self._entries[name].handlers(position).clear()

    def handlers(self, target, position):
        return tuple(self._entries[self.resolve(target)].handlers(position))

    def invoke(self, name, *args, **kwargs):
        try:
            entry = self._entries[name]
        except KeyError:
            raise PluginError(f"no function exposed to plugins as {name!r}") from None
        if entry.idle():
            return entry.original(*args, **kwargs)

        short_circuit = None
        for handler in tuple(entry.before):
            outcome = handler(*args, **kwargs)
            if isinstance(outcome, ChangedArgs):
                args, kwargs = outcome.args, outcome.kwargs
            elif isinstance(outcome, ChangedResult):
                short_circuit = outcome
                break

        if short_circuit is not None:
            result = short_circuit.value
        elif entry.instead:
            result = entry.instead[-1](*args, **kwargs)
            if isinstance(result, ChangedResult):
                result = result.value
        else:
            result = entry.original(*args, **kwargs)

        for handler in tuple(entry.after):
            outcome = handler(*args, result, **kwargs)
            if isinstance(outcome, ChangedResult):
                result = outcome.value
        return result


default_registry = HookRegistry()


def expose_to_plugins(fn, name=None, registry=None):
    """Register ``fn`` for extension and return the hooked callable.

    Without attached handlers the hooked callable behaves exactly like ``fn``.
    """
    return (registry or default_registry).expose(fn, name)


def attach_handler(handler, target, position, registry=None):
    """Append ``handler`` at ``position`` ("before", "after" or "instead")."""
    (registry or _registry_of(target)).attach(handler, target, position)


def remove_handler(target, position, registry=None):
    """Drop every handler at ``position``; other positions are left alone."""
    (registry or _registry_of(target)).remove(target, position)


def _registry_of(target):
    return getattr(target, "__plugin_registry__", default_registry)
