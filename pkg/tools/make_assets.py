"""Regenerate the shipped dictionary and bigram assets.

The dictionary is a compact curated list of common English words plus the
storefront / drink vocabulary used by the synthetic dataset generator.  The
bigram asset is derived from it deterministically; rerunning this script must
reproduce both files byte for byte.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from morphofv.phoc import derive_bigrams, normalize_word  # noqa: E402

WORDS = """
the of and a to in is you that it he was for on are as with his they i at be
this have from or one had by word but not what all were we when your can said
there use an each which she do how their if will up other about out many then
them these so some her would make like him into time has look two more write
go see number no way could people my than first water been call who oil its
now find long down day did get come made may part over new sound take only
little work know place year live me back give most very after thing our just
name good sentence man think say great where help through much before line
right too mean old any same tell boy follow came want show also around form
three small set put end does another well large must big even such because
turn here why ask went men read need land different home us move try kind
hand picture again change off play spell air away animal house point page
letter mother answer found study still learn should america world high every
near add food between own below country plant last school father keep tree
never start city earth eye light thought head under story saw left dont few
while along might close something seem next hard open example begin life
always those both paper together got group often run important until children
side feet car mile night walk white sea began grow took river four carry
state once book hear stop without second later miss idea enough eat face
watch far really almost let above girl sometimes mountain cut young talk soon
list song being leave family music body color stand sun questions fish area
mark dog horse birds problem complete room knew since ever piece told usually
friends easy heard order red door sure become top ship across today during
short better best however low hours black products happened whole measure
remember early waves reached listen wind rock space covered fast several hold
himself toward five step morning passed vowel true hundred against pattern
numeral table north slowly money map farm pulled draw voice seen cold cried
plan notice south sing war ground fall king town unit figure certain field
travel wood fire upon done english road half ten fly gave box finally wait
correct oh quickly person became shown minutes strong verb stars front feel
fact inches street decided contain course surface produce building ocean
class note nothing rest carefully scientists inside wheels stay green known
island week less machine base ago stood plane system behind ran round boat
game force brought understand warm common bring explain dry though language
shape deep thousands yes clear equation yet government filled heat full hot
check object am rule among noun power cannot able six size dark ball material
special heavy fine pair circle include built knowledge past million unhappy
labor quiet ancient stick afraid gray desert velvet obtain bone rail ladder
suggested copper topic solution fresh sensible terrible chief japanese stream
planet planets parallel apparent indicated nine evening rhythm eleven twelve
liquid metal motion section spoke sight sign total weather science bright
capital resent grew skin laughed moment scale basic happy value fall spring
summer winter autumn coast bank branch matter soft whether clothes flowers
shall teacher held describe drive cross speak solve appear metal son either
ice sleep village factors result jumped snow ride care floor hill pushed
baby buy century outside everything tall already instead phrase soil bed
copy free hope spring case laughed nation quite type themselves temperature
bright lead everyone method within dress moon visit sharp wrong test direct
sugar belong human else beside gone flat pretty corn trip shell row gentle
blue catch supply stretched ahead chance born level triangle molecules
repeated whose received garden please strange caught fell team god captain
direction says bread fought wear job block experiment mouth particular
exactly yellow mine bear sorry store statement paint mind signal yard double
window difference distance heart site sum summer wall forest probably legs
sat main winter wide written length reason kept interest arms brother race
present beautiful possible appear art century doctor store opposite wild
suppose iron cool cause bad guess dance pleasant position entered fruit tied
rich dollars send sight chief offer property particular swim ready anything
divided general energy subject moment kill lady else blood mixed continued
framework cattle himself worth educated wish guard pounds practice seeds
crowd poem market age amount led broken moon interesting course conditions
bakery bread cake flour pastry croissant muffin dough baker oven loaf crust
pizzeria pizza calzone slice mozzarella pepperoni basil crusty margherita
cafe espresso latte coffee mocha barista brew roast bean cappuccino
bistro menu plate dish entree chef sauce grill roast kitchen dinner
pharmacy medicine tablet capsule dose remedy vitamin aspirin
theatre cinema stage drama ticket screen actor scene movie show
barber shave haircut razor trim scissors comb salon
tavern ale lager pint stout brewery hops barrel draft
bookstore novel author pages cover shelf reader library
florist flower rose tulip petal bouquet stem bloom
butcher steak meat pork cutlet sausage beef lamb
grocer market produce grain basket scale goods
soda cola root beer ginger tonic fizz bubble syrup
vodka whiskey brandy ouzo gin rum liqueur spirit
wine merlot chablis sauterne vineyard grape cork cellar
juice lemonade nectar cider punch drink bottle glass
milk cream shake malt dairy churn butter
water mineral spring sparkling still ounce liter
guinness porter bitter quinine sarsaparilla birch
tobacco cigar pipe leaf smoke ash match
school pupil lesson chalk board desk grade exam
hotel lobby suite guest room key porter inn
repairs garage wrench engine motor tire brake oilcan
laundry press steam fold iron hanger dryer detergent
funeral wreath chapel mourn casket solemn
jewelry ring gold silver gem pearl watch chain
bank teller vault loan coin cash credit ledger
pawnshop pledge broker trade swap barter
tearoom teapot kettle saucer blend herbal oolong
diner booth counter waffle pancake bacon eggs toast
steakhouse ribeye sirloin charcoal flame rare medium
massage spa lotion towel relax therapy
medical clinic nurse surgeon ward healer bandage
discount house bargain sale price cheap offer deal
dryclean solvent garment stain press crease
"""


def main():
    data_dir = Path(__file__).resolve().parents[1] / "src" / "morphofv" / "data"
    words = sorted({normalize_word(w) for w in WORDS.split()} - {""})
    dict_path = data_dir / "dictionary_en.txt"
    dict_path.write_text("\n".join(words) + "\n")
    bigrams = derive_bigrams(words, 50)
    (data_dir / "bigrams_en_50.txt").write_text("\n".join(bigrams) + "\n")
    print(f"dictionary: {len(words)} words -> {dict_path}")
    print(f"bigrams: {bigrams[:10]} ...")


if __name__ == "__main__":
    main()
