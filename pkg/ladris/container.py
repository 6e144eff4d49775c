# ladris/container.py

import os

from dependency_injector import containers, providers

from .dataset import AnnotationPipeline, TemplateBank
from .dataset.clients import OpenAICaptionerClient, RasterSegmenterClient, TemplateCaptionerClient
from .language import load_vocabulary
from .models import RunConfig


class Container(containers.DeclarativeContainer):
    """IoC container for the annotation stack."""

    config = providers.Configuration()

    vocabulary = providers.Singleton(load_vocabulary, path=config.paths.vocabulary)

    template_bank = providers.Singleton(TemplateBank.load, path=config.paths.templates)

    # Clients
    segmenter = providers.Singleton(RasterSegmenterClient)

    captioner = providers.Selector(
        config.captioner["provider"],
        template=providers.Singleton(TemplateCaptionerClient, template_bank=template_bank),
        openai=providers.Singleton(
            OpenAICaptionerClient,
            api_key=config.captioner.api_key,
            model=config.captioner.model,
            base_url=config.captioner.base_url,
            timeout_seconds=config.captioner.timeout_seconds
        )
    )

    annotation_pipeline = providers.Singleton(
        AnnotationPipeline,
        segmenter=segmenter,
        captioner=captioner,
        vocab=vocabulary
    )


def build_container(config: RunConfig) -> Container:
    """Container configured from a run config plus the captioner credentials in the environment."""
    container = Container()
    captioner = config.clients.captioner
    container.config.from_dict({
        "paths": {"vocabulary": None, "templates": None},
        "captioner": {
            "provider": captioner.provider,
            "model": captioner.model,
            "base_url": captioner.base_url or os.getenv("CAPTIONER_BASE_URL"),
            "timeout_seconds": captioner.timeout_seconds,
            "api_key": os.getenv("CAPTIONER_API_KEY"),
        }
    })
    return container
