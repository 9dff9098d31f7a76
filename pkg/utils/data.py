import argparse
import importlib
import logging
import os

from utils import default
from utils.config import Config

logger = logging.getLogger(__name__)


def command(name: str = None, aliases: tuple = ()):
    """ Mark a Cog method as a subcommand """
    def decorator(func):
        func.__lab_command__ = {
            "name": name or func.__name__.replace("_", "-"),
            "aliases": tuple(aliases),
            "parent": None,
        }
        func.__lab_arguments__ = getattr(func, "__lab_arguments__", [])
        return func
    return decorator


def argument(*flags, **kwargs):
    """ Add an argparse argument to a command; stack them like the flags read """
    def decorator(func):
        func.__lab_arguments__ = [(flags, kwargs)] + getattr(func, "__lab_arguments__", [])
        return func
    return decorator


class Group:
    """ A command with subcommands, e.g. `verify ringel` """
    def __init__(self, func, name: str):
        self.callback = func
        self.name = name
        self.help = (func.__doc__ or "").strip()

    def command(self, name: str = None, aliases: tuple = ()):
        def decorator(func):
            marked = command(name, aliases)(func)
            marked.__lab_command__["parent"] = self.name
            return marked
        return decorator


def group(name: str = None):
    def decorator(func):
        return Group(func, name or func.__name__)
    return decorator


class Cog:
    """ A set of commands and listeners, loaded from cogs/*.py by setup(app) """
    def __init__(self, app: "LabApp"):
        self.app = app

    def get_commands(self) -> list:
        found = []
        for attr in dir(type(self)):
            value = getattr(self, attr)
            if hasattr(value, "__lab_command__"):
                found.append(value)
        return found

    def get_groups(self) -> list[Group]:
        return [v for v in vars(type(self)).values() if isinstance(v, Group)]

    def get_listeners(self) -> list:
        return [getattr(self, attr) for attr in dir(type(self)) if attr.startswith("on_")]


class LabApp:
    def __init__(self, config: Config, prog: str = "quiverlab"):
        self.config = config
        self.parser = argparse.ArgumentParser(
            prog=prog, description="Quiver Lie algebras and Hall numbers, checked by machine."
        )
        self._subparsers = self.parser.add_subparsers(dest="command_name", required=True)
        self._groups: dict[str, argparse._SubParsersAction] = {}
        self.commands: dict[str, object] = {}
        self.cogs: dict[str, Cog] = {}
        self.listeners: dict[str, list] = {}
        self.loaded = False

    def setup_hook(self, folder: str = "cogs"):
        for file in sorted(os.listdir(folder)):
            if not file.endswith(".py"):
                continue  # Skip non-python files

            name = file[:-3]
            self.load_extension(f"{folder}.{name}")
        self.loaded = True

    def load_extension(self, name: str):
        module = importlib.import_module(name)
        module.setup(self)

    def add_cog(self, cog: Cog):
        self.cogs[type(cog).__name__] = cog
        for grp in cog.get_groups():
            parser = self._subparsers.add_parser(grp.name, help=grp.help)
            self._groups[grp.name] = parser.add_subparsers(dest="subcommand", required=True)
        for func in cog.get_commands():
            meta = func.__lab_command__
            parent = self._groups[meta["parent"]] if meta["parent"] else self._subparsers
            parser = parent.add_parser(
                meta["name"], aliases=list(meta["aliases"]),
                help=(func.__doc__ or "").strip().splitlines()[0] if func.__doc__ else None,
            )
            for flags, kwargs in func.__lab_arguments__:
                parser.add_argument(*flags, **kwargs)
            parser.set_defaults(callback=func)
            full = f"{meta['parent']} {meta['name']}" if meta["parent"] else meta["name"]
            self.commands[full] = func
        for listener in cog.get_listeners():
            self.listeners.setdefault(listener.__name__, []).append(listener)

    def dispatch(self, event: str, *args):
        results = []
        for listener in self.listeners.get(f"on_{event}", []):
            results.append(listener(*args))
        return results

    def run(self, argv: list[str] = None) -> int:
        if not self.loaded:
            self.setup_hook()
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as err:
            return int(err.code or 0)

        ctx = default.CustomContext(self, args)
        if getattr(args, "subcommand", None):
            ctx.command = f"{args.command_name} {args.subcommand}"
        self.dispatch("command", ctx)
        try:
            return int(args.callback(ctx) or 0)
        except Exception as err:
            codes = self.dispatch("command_error", ctx, err)
            if not codes:
                raise
            return int(codes[0])
