const XS: [f64; 60] = [0.032757702423259615, 0.13374803168699145, 0.225828722352162, 0.3301236098632217, 0.4128333528991789, 0.5412792489863932, 0.6148905925918371, 0.7394827436655761, 0.8400285433512181, 0.926949932333082, 1.0124995960388332, 1.1358141796663404, 1.2164510847534986, 1.3354200777597727, 1.4086389098782093, 1.539128866046667, 1.629871629877016, 1.727823069971055, 1.8198725218418985, 1.9322978584095838, 2.015247110789642, 2.1417266198433937, 2.23524366770871, 2.3303882572799925, 2.4349941763561223, 2.5198437019251285, 2.630923268804327, 2.7187491456046704, 2.828012629738078, 2.907493491936475, 3.0036083695013076, 3.10984752625227, 3.227458865894005, 3.318812304269523, 3.4226705747190866, 3.5188542595133185, 3.6472693090792747, 3.721714529488236, 3.8010544874239716, 3.907980000600219, 4.037433850346133, 4.141603571828456, 4.234926146129147, 4.349561137147248, 4.408019285043702, 4.533832786697895, 4.61207146239467, 4.707895726710558, 4.821942750317977, 4.924916418176145, 5.039044658327475, 5.139829434268177, 5.206495162611827, 5.32249053651467, 5.437066704081372, 5.514091469720006, 5.633614655165002, 5.74402397563681, 5.806673755357043, 5.949380525387824];
const YS: [f64; 60] = [-0.025803858802523047, 0.015380173911884551, 0.22081402121408555, 0.2851463934410851, 0.363460913009759, 2.417048768667385, 0.6199283559989697, 0.8202492298415693, 0.7339393007739962, 0.8374406741473465, 0.9093250493580614, 1.0507328349334881, 0.9215111407216054, 1.0443950581585764, 0.841592888298649, 0.8618605035548086, 0.9219647305869312, 0.9922623704213438, 0.8739255335058582, 1.0003300746508335, 1.0442905436041252, 0.8084261834960734, 2.6749125527347712, 0.7398399214582652, 0.7704465235399336, 0.6821516331163608, 0.34360736839420847, 0.29322574673835966, 0.26952118636966127, 0.3230771969875385, 0.013264511491776682, 0.15124579622563, -0.08909055095014673, -0.2963121988532663, -0.3348498282207292, -0.48157457979607765, -0.3968196178930855, -0.5285032143690696, -0.4746112743293789, 1.2611679824549398, -0.7146947635326666, -0.9365612240791552, -1.0224984079986434, -1.0757526971929738, -0.8056835404745812, -1.1223417796416173, -0.9531976854123206, -0.8772618610458343, -0.8853133825690481, -1.0784768080894442, -1.0960085824607928, -0.9720785615762019, -0.9649588708992424, -0.8965853166412904, -0.684528832908581, -0.7825877419632489, 1.4251417009946605, -0.5990438182802831, -0.44130311901960934, -0.3482012757076529];
const FIT_DEFAULT: [f64; 60] = [0.5681786179000221, 0.585603010491491, 0.6003400526534494, 0.6156759241707136, 0.6268135306914976, 0.6423588810831149, 0.6503480198444911, 0.6624363089052608, 0.6709666250512616, 0.6775274002896775, 0.6833028694324746, 0.6905354335168564, 0.6946212812875436, 0.6997795199075993, 0.7024501203226794, 0.706200750692093, 0.7078930618345386, 0.7084389539197509, 0.7067309151031411, 0.698429289276994, 0.6689590649773238, 0.6155420569543923, 0.5732199845907585, 0.5260337641909748, 0.4736530802240661, 0.42422940555688843, 0.3558240221948769, 0.29886976244249175, 0.2236048631798013, 0.16802413493026294, 0.09840683861001516, 0.021187660457425414, -0.06546014697019926, -0.13229679465851052, -0.20512608929787884, -0.2750428019220531, -0.36007210563670977, -0.4058329257758598, -0.4549686703048353, -0.5157690277984105, -0.5736026262829665, -0.6013287054445057, -0.6226840551780042, -0.6474537310318424, -0.6598605807709197, -0.6862702352797735, -0.7024798597243679, -0.7220473372706859, -0.744821888193744, -0.7648059665917758, -0.7862025758674069, -0.8043449432257385, -0.815912828276122, -0.8351323977476633, -0.852874614891664, -0.8640510443781265, -0.8801317771104282, -0.8935698294152236, -0.900572931102502, -0.9148478254248776];
const FIT_NARROW: [f64; 60] = [0.019731763693565572, 0.11233167140664217, 0.19560332786462975, 0.28854541169109316, 0.36120211564945737, 0.47225329435848384, 0.5350631311277044, 0.640962453098646, 0.7274783622506564, 0.7800031294903864, 0.826791140178103, 0.8721495421989507, 0.8907753878625517, 0.9107028007601806, 0.9220926495261818, 0.9300474163098785, 0.9291790907232119, 0.9198541486392128, 0.9039871218005937, 0.8743785862401878, 0.8480104122041489, 0.7953594460233288, 0.7432308712880665, 0.6824366991426684, 0.6147247121823712, 0.5517307171626394, 0.4612634897048456, 0.38180604577598704, 0.2774442651084438, 0.1990684140644096, 0.10375482323069733, 0.0035902604897413513, -0.10062259184411054, -0.17878735274508806, -0.2655019343498268, -0.3486332350197579, -0.459409480105688, -0.519956896983938, -0.5805714793114006, -0.6537442098386044, -0.7308205535229422, -0.7827210181306861, -0.8268902302787983, -0.8874701981659479, -0.9069862888029555, -0.9467386967303696, -0.9595398996927693, -0.963774985534971, -0.9583457650448788, -0.9482612825062592, -0.9238463798186994, -0.8932336436260029, -0.8594332721913136, -0.798950392961495, -0.7385437319320816, -0.6971044042730193, -0.6311382549551675, -0.5681881336632613, -0.5315643078080692, -0.44569218897171436];
