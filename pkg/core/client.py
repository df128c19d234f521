from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, TextIO, Tuple, Type

from core.errors import RecAGTError
from core.logs import level_from_verbosity, setup_logging
from core.settings import Settings

CommandCallback = Callable[['Context'], None]
ErrorHandler = Callable[['Context', BaseException], int]
OptionSpec = Tuple[Tuple[str, ...], Dict[str, Any]]


class Context:
    """What a command gets to work with: parsed arguments, resolved settings and the output streams."""

    def __init__(self, app: RecAGTApp, command: str, args: argparse.Namespace, settings: Settings) -> None:
        self.app: RecAGTApp = app
        self.command: str = command
        self.args: argparse.Namespace = args
        self.settings: Settings = settings

    def __repr__(self) -> str:
        return f"<Context(command={self.command!r})>"

    @property
    def out(self) -> Optional[Path]:
        return self.settings.output_path(self.args.out)

    def given(self, key: str) -> bool:
        return getattr(self.args, key, None) is not None

    def send(self, text: str = '') -> None:
        print(text, file=self.app.stdout)

    def header(self, **extra: Any) -> Dict[str, Any]:
        return {'command': self.command, **self.settings.resolved(), **extra}


class RecAGTApp:
    """Command registry over argparse sub-commands, in the shape of a chat bot's command tree."""

    COMMON_KEYS = frozenset({'command', 'callback', 'config', 'out', 'verbose'})

    def __init__(self, settings_cls: Type[Settings] = Settings, *, prog: str = 'recagt',
                 stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> None:
        self.settings_cls: Type[Settings] = settings_cls
        self.parser = argparse.ArgumentParser(prog=prog, description="Shard recovery and malicious node identification simulator.")
        self.subparsers = self.parser.add_subparsers(dest='command', metavar='command')
        self.subparsers.required = True
        self.commands: Dict[str, CommandCallback] = {}
        self._stdout = stdout
        self._stderr = stderr
        self.error_handler: Optional[ErrorHandler] = None
        self.logger: logging.Logger = logging.getLogger('core.client')

    @property
    def stdout(self) -> TextIO:
        return self._stdout or sys.stdout

    @property
    def stderr(self) -> TextIO:
        return self._stderr or sys.stderr

    @staticmethod
    def option(*flags: str, **kwargs: Any) -> Callable[[CommandCallback], CommandCallback]:
        def decorator(func: CommandCallback) -> CommandCallback:
            specs: List[OptionSpec] = func.__dict__.setdefault('__options__', [])
            specs.insert(0, (flags, kwargs))
            return func
        return decorator

    def command(self, name: Optional[str] = None, *, help: str) -> Callable[[CommandCallback], CommandCallback]:
        def decorator(func: CommandCallback) -> CommandCallback:
            command_name = name or func.__name__
            sub = self.subparsers.add_parser(command_name, help=help, description=help)
            sub.add_argument('--seed', type=int, help="Root seed for every random stream.")
            sub.add_argument('--out', help="Write the result table as CSV to this path.")
            sub.add_argument('--config', help="key=value file applied over the defaults.")
            sub.add_argument('-v', '--verbose', action='count', default=0, help="-v for info, -vv for debug logs.")
            for flags, kwargs in func.__dict__.get('__options__', []):
                sub.add_argument(*flags, **kwargs)
            sub.set_defaults(callback=func)
            self.commands[command_name] = func
            return func
        return decorator

    def event(self, func: ErrorHandler) -> ErrorHandler:
        if func.__name__ != 'on_command_error':
            raise TypeError(f"Unknown event handler {func.__name__}")
        self.error_handler = func
        return func

    def resolve_settings(self, args: argparse.Namespace, environ: Optional[Mapping[str, str]] = None) -> Settings:
        settings = self.settings_cls()
        if args.config:
            settings = self.settings_cls.from_file(args.config, base=settings)
        settings.apply_env(environ)
        keys = set(self.settings_cls.keys())
        settings.update({k: v for k, v in vars(args).items() if k in keys and k not in self.COMMON_KEYS})
        return settings

    def on_command_error(self, ctx: Optional[Context], error: BaseException) -> int:
        if self.error_handler is not None:
            return self.error_handler(ctx, error)
        if isinstance(error, RecAGTError):
            print(f"error: {error.message}", file=self.stderr)
            return error.exit_code
        self.logger.exception(f"Command {ctx.command if ctx else '?'} failed", exc_info=error)
        return 1

    def run(self, argv: Optional[Sequence[str]] = None, *, environ: Optional[Mapping[str, str]] = None) -> int:
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as e:
            return e.code if isinstance(e.code, int) else 2

        setup_logging(level_from_verbosity(args.verbose), stream=self._stderr)
        ctx: Optional[Context] = None
        try:
            ctx = Context(self, args.command, args, self.resolve_settings(args, environ))
            self.logger.debug(f"Running {args.command} with {ctx.settings!r}")
            args.callback(ctx)
        except Exception as error:
            return self.on_command_error(ctx, error)
        return 0

    def startup(self) -> None:
        sys.exit(self.run())
