import json
from pathlib import Path
from typing import Type, TypeVar

from loguru import logger
from pydantic import BaseModel, ValidationError

from qes.errors import ConfigFileError

M = TypeVar("M", bound=BaseModel)


class ResultStore:
    """Atomic text writes and schema-checked JSON reads."""

    def __init__(self, root: Path = Path(".")):
        self.root = Path(root)

    def path_for(self, name) -> Path:
        path = Path(name)
        return path if path.is_absolute() else self.root / path

    def write_text(self, name, text: str) -> Path:
        target = self.path_for(name)
        target.parent.mkdir(parents=True, exist_ok=True)
        tmp_file = target.with_suffix(target.suffix + ".tmp")

        try:
            with open(tmp_file, "w", encoding="utf-8", newline="") as f:
                f.write(text)
            tmp_file.replace(target)
            logger.info(f"Wrote {target} ({len(text):,} bytes)")
            return target
        except OSError as e:
            logger.error(f"Error writing {target}: {e}")
            if tmp_file.exists():
                tmp_file.unlink()
            raise

    def load(self, name, model: Type[M]) -> M:
        source = self.path_for(name)
        try:
            with open(source, "r", encoding="utf-8") as f:
                data = json.load(f)
        except FileNotFoundError as e:
            raise ConfigFileError(f"File not found: {source}") from e
        except json.JSONDecodeError as e:
            raise ConfigFileError(f"{source} is not valid JSON: {e}") from e

        try:
            document = model.model_validate(data)
        except ValidationError:
            logger.error(f"{source} does not match the {model.__name__} schema")
            raise
        logger.debug(f"Loaded {model.__name__} from {source}")
        return document
