"""
Run manifests

Each command writes <output>.manifest.json next to its main output. The
manifest digest covers everything that determines the outputs (command,
resolved configuration, input digests, tool version, output paths) and
leaves out timings, so reruns with the same inputs produce the same
digest.
"""

import hashlib
import json
import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import anygram

logger = logging.getLogger(__name__)

MANIFEST_SUFFIX = '.manifest.json'


def file_digest(path, chunk_size=1 << 20):
    """sha256 of a file's bytes."""
    hasher = hashlib.sha256()
    with open(path, 'rb') as handle:
        for chunk in iter(lambda: handle.read(chunk_size), b''):
            hasher.update(chunk)
    return hasher.hexdigest()


def manifest_path(output):
    return Path(f'{output}{MANIFEST_SUFFIX}')


@dataclass
class RunManifest:
    command: str
    config: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    version: str = anygram.__version__

    def add_input(self, name, path):
        if path:
            self.inputs[name] = {'path': str(path), 'sha256': file_digest(path)}

    def add_output(self, path):
        if str(path) not in self.outputs:
            self.outputs.append(str(path))

    @contextmanager
    def timed(self, phase):
        started = time.perf_counter()
        try:
            yield
        finally:
            self.timings[phase] = round(time.perf_counter() - started, 6)

    def reproducible_part(self):
        return {
            'command': self.command,
            'version': self.version,
            'config': self.config,
            'inputs': self.inputs,
            'outputs': self.outputs,
        }

    @property
    def digest(self):
        canonical = json.dumps(self.reproducible_part(), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()

    def as_dict(self):
        data = self.reproducible_part()
        data['timings'] = self.timings
        data['digest'] = self.digest
        return data

    def write(self, output):
        """Write next to output and return the manifest path."""
        path = manifest_path(output)
        with open(path, 'w', encoding='utf-8') as out:
            json.dump(self.as_dict(), out, indent=2, sort_keys=True)
            out.write('\n')
        logger.info(f"Manifest {self.digest[:12]} written to {path}")
        return path


def read_manifest(path):
    with open(path, 'r', encoding='utf-8') as handle:
        return json.load(handle)
