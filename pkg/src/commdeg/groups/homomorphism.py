from __future__ import annotations

import logging

from .base import GroupModel, HomomorphismError, MalformedSpecError, PayloadMap, free_reduce

log = logging.getLogger(__name__)


class Homomorphism:
    """A map from a model onto a finite target, fixed by generator images.

    Construction evaluates every stored defining relation of the source in the
    target; a violated relation raises :class:`HomomorphismError`. Sources with
    no known relations give an *unverified* homomorphism.

    ``payload_map`` is an optional fast path for ``image``; it must agree with
    word evaluation (the test-suite checks this on samples).
    """

    def __init__(
        self,
        source: GroupModel,
        target: GroupModel,
        images: dict,
        payload_map: PayloadMap | None = None,
        label: str = "",
    ):
        if not target.is_finite:
            raise MalformedSpecError("homomorphism target must be finite")
        missing = set(source.generator_names) - set(images)
        if missing:
            raise MalformedSpecError(f"missing generator images: {sorted(missing)}")
        self.source = source
        self.target = target
        self.images = {k: target.check(v) for k, v in images.items()}
        self._gen_images = [self.images[n] for n in source.generator_names]
        self.payload_map = payload_map
        self.label = label
        rels = source.relations()
        if rels is None:
            self.verified = False
            log.warning("homomorphism %s: source has no stored relations; unverified", label or "")
        else:
            for rel in rels:
                if self._eval_word(rel) != target.identity:
                    raise HomomorphismError(
                        f"relation {rel} does not map to the identity under {label or 'hom'}"
                    )
            self.verified = True

    def __repr__(self) -> str:
        return f"<Homomorphism {self.label or ''} {self.source.kind} -> {self.target.kind}>"

    def _eval_word(self, word):
        T = self.target
        out = T.identity
        for x in word:
            img = self._gen_images[abs(x) - 1]
            out = T.mul(out, img if x > 0 else T.inv(img))
        return out

    def image_by_word(self, g):
        return self._eval_word(free_reduce(self.source.spell(g)))

    def image(self, g):
        if self.payload_map is not None:
            return self.payload_map(g)
        return self.image_by_word(g)

    def image_subgroup(self) -> list:
        """Elements of the image (the subgroup generated by generator images)."""
        from .finite import subgroup_closure

        return subgroup_closure(self.target, self._gen_images)

    @property
    def index(self) -> int:
        """[G : ker] = size of the image."""
        return len(self.image_subgroup())

    def kernel_elements(self) -> list:
        return [g for g in self.source.elements() if self.image(g) == self.target.identity]

    def in_kernel(self, g) -> bool:
        return self.image(g) == self.target.identity


def parity_homomorphism(G: GroupModel) -> Homomorphism:
    """Word-length parity onto Z2; valid only when every relator has even length."""
    from .finite import cyclic

    Z2 = cyclic(2)
    images = {n: 1 for n in G.generator_names}
    if G.kind == "free":
        fast = lambda g: len(g) % 2  # noqa: E731
    else:
        fast = lambda g: len(G.spell(g)) % 2  # noqa: E731
    return Homomorphism(G, Z2, images, payload_map=fast, label="length-parity")
